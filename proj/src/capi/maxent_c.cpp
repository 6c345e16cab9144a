#include "maxent/maxent.h"

#include <filesystem>
#include <fstream>
#include <new>
#include <string>
#include <thread>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "maxent/io.hpp"
#include "maxent/sampler.hpp"
#include "maxent/solver.hpp"
#include "maxent/swap.hpp"

struct maxent_matrix {
  maxent::DataMatrix value;
};
struct maxent_margins {
  maxent::MarginTargets value;
};
struct maxent_model {
  maxent::MaxEntModel value;
};
struct maxent_trace {
  maxent::FitTrace value;
};
struct maxent_report {
  maxent::AssessmentReport value;
};

namespace {

thread_local std::string last_error;

maxent_status set_error(maxent_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
maxent_status guarded(F&& body) {
  last_error.clear();
  try {
    return body();
  } catch (const maxent::Error& e) {
    return set_error(static_cast<maxent_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(MAXENT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(MAXENT_ERR_INTERNAL, e.what());
  }
}

std::string_view arg(const char* s, const char* what) {
  if (!s) maxent::fail(maxent::ErrorKind::Usage, std::string(what) + " is required");
  return s;
}

maxent::Domain domain_arg(const char* s) {
  try {
    return maxent::parse_domain(arg(s, "domain"));
  } catch (const maxent::Error& e) {
    maxent::fail(maxent::ErrorKind::Usage, e.what());
  }
}

maxent::StructureKind structure_arg(const char* s) {
  try {
    return maxent::parse_structure(arg(s, "structure"));
  } catch (const maxent::Error& e) {
    maxent::fail(maxent::ErrorKind::Usage, e.what());
  }
}

void require(const void* p, const char* what) {
  if (!p) maxent::fail(maxent::ErrorKind::Usage, std::string(what) + " must not be NULL");
}

maxent::Structure make_structure(maxent::StructureKind kind, bool self_loops, std::size_t rows, std::size_t cols) {
  switch (kind) {
    case maxent::StructureKind::Database: return maxent::Structure::database(rows, cols);
    case maxent::StructureKind::Directed: return maxent::Structure::directed(rows, self_loops);
    case maxent::StructureKind::Undirected: return maxent::Structure::undirected(rows, self_loops);
  }
  return {};
}

maxent::DeltaMode parse_delta_mode(std::string_view s) {
  if (s == "unit") return maxent::DeltaMode::UnitSwap;
  if (s == "integer") return maxent::DeltaMode::IntegerUniform;
  if (s == "real") return maxent::DeltaMode::RealAdditionMask;
  maxent::fail(maxent::ErrorKind::Usage, "unknown delta mode '" + std::string(s) + "'");
}

}  // namespace

extern "C" {

const char* maxent_last_error(void) { return last_error.c_str(); }

maxent_status maxent_matrix_read(const char* path, const char* format, const maxent_layout* layout,
                                 maxent_matrix** out) {
  return guarded([&] {
    require(layout, "layout");
    require(out, "out");
    maxent::MatrixLayout l;
    l.domain = domain_arg(layout->domain);
    l.kind = structure_arg(layout->structure);
    l.self_loops = layout->self_loops != 0;
    l.rows = layout->rows;
    l.cols = layout->cols;
    auto m = maxent::read_matrix_file(std::string(arg(path, "path")), maxent::parse_format(arg(format, "format")), l);
    *out = new maxent_matrix{std::move(m)};
    return MAXENT_OK;
  });
}

maxent_status maxent_matrix_write(const maxent_matrix* m, const char* path, const char* format) {
  return guarded([&] {
    require(m, "matrix");
    maxent::write_matrix_file(std::string(arg(path, "path")), m->value, maxent::parse_format(arg(format, "format")));
    return MAXENT_OK;
  });
}

maxent_status maxent_matrix_shape(const maxent_matrix* m, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(m, "matrix");
    if (rows) *rows = m->value.rows();
    if (cols) *cols = m->value.cols();
    return MAXENT_OK;
  });
}

maxent_status maxent_matrix_get(const maxent_matrix* m, size_t i, size_t j, double* value) {
  return guarded([&] {
    require(m, "matrix");
    require(value, "value");
    if (i >= m->value.rows() || j >= m->value.cols()) maxent::fail(maxent::ErrorKind::Usage, "index out of range");
    *value = m->value.get(static_cast<maxent::Index>(i), static_cast<maxent::Index>(j));
    return MAXENT_OK;
  });
}

void maxent_matrix_free(maxent_matrix* m) { delete m; }

maxent_status maxent_margins_from_matrix(const maxent_matrix* m, maxent_margins** out) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    *out = new maxent_margins{maxent::compute_margins(m->value)};
    return MAXENT_OK;
  });
}

maxent_status maxent_margins_read(const char* path, const char* structure, maxent_margins** out) {
  return guarded([&] {
    require(out, "out");
    auto t = maxent::read_margins_file(std::string(arg(path, "path")),
                                       structure_arg(structure));
    *out = new maxent_margins{std::move(t)};
    return MAXENT_OK;
  });
}

maxent_status maxent_margins_write(const maxent_margins* t, const char* path) {
  return guarded([&] {
    require(t, "margins");
    std::ofstream out(std::string(arg(path, "path")), std::ios::binary);
    if (!out) maxent::fail(maxent::ErrorKind::Input, std::string("cannot open '") + path + "' for writing");
    maxent::write_margins(out, t->value);
    return MAXENT_OK;
  });
}

maxent_status maxent_margins_size(const maxent_margins* t, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(t, "margins");
    if (rows) *rows = t->value.rows.size();
    if (cols) *cols = t->value.cols.size();
    return MAXENT_OK;
  });
}

void maxent_margins_free(maxent_margins* t) { delete t; }

void maxent_fit_config_default(maxent_fit_config* config) {
  if (!config) return;
  const maxent::SolverConfig d;
  config->solver = "newton";
  config->tol = d.tol;
  config->max_iter = d.max_iter;
  config->max_bins = 0;
}

maxent_status maxent_fit(const maxent_margins* targets, const char* domain, const char* structure, int self_loops,
                         const maxent_fit_config* config, maxent_model** model, maxent_trace** trace) {
  return guarded([&] {
    require(targets, "targets");
    require(config, "config");
    require(model, "model");
    const auto d = domain_arg(domain);
    const auto kind = structure_arg(structure);
    const auto& t = targets->value;
    if (kind == maxent::StructureKind::Undirected && !t.symmetric)
      maxent::fail(maxent::ErrorKind::Input, "undirected networks take a single degree sequence");
    if (kind != maxent::StructureKind::Undirected && t.symmetric)
      maxent::fail(maxent::ErrorKind::Input, "symmetric degree targets need an undirected structure");
    const auto s = make_structure(kind, self_loops != 0, t.rows.size(), t.symmetric ? t.rows.size() : t.cols.size());

    maxent::SolverConfig c;
    const std::string_view solver = arg(config->solver, "solver");
    if (solver == "newton") {
      c.method = maxent::SolverMethod::Newton;
    } else if (solver == "pgd") {
      c.method = maxent::SolverMethod::PrecondGradDescent;
    } else {
      maxent::fail(maxent::ErrorKind::Usage, "unknown solver '" + std::string(solver) + "'");
    }
    if (!(config->tol > 0.0)) maxent::fail(maxent::ErrorKind::Usage, "tolerance must be positive");
    c.tol = config->tol;
    c.max_iter = config->max_iter;
    if (config->max_bins > 0) c.max_bins = config->max_bins;

    auto result = maxent::fit(t, d, s, c);
    const bool converged = result.trace.status == maxent::FitStatus::Converged;
    const std::size_t iterations = result.model.fit_info().iterations;
    *model = new maxent_model{std::move(result.model)};
    if (trace) *trace = new maxent_trace{std::move(result.trace)};
    if (!converged)
      return set_error(MAXENT_ERR_NOT_CONVERGED,
                       "solver stopped after " + std::to_string(iterations) + " iterations without converging");
    return MAXENT_OK;
  });
}

maxent_status maxent_trace_write_csv(const maxent_trace* trace, const char* path) {
  return guarded([&] {
    require(trace, "trace");
    std::ofstream out(std::string(arg(path, "path")), std::ios::binary);
    if (!out) maxent::fail(maxent::ErrorKind::Input, std::string("cannot open '") + path + "' for writing");
    maxent::write_trace_csv(out, trace->value);
    return MAXENT_OK;
  });
}

size_t maxent_trace_iterations(const maxent_trace* trace) {
  return trace && !trace->value.records.empty() ? trace->value.records.back().iteration : 0;
}

void maxent_trace_free(maxent_trace* trace) { delete trace; }

maxent_status maxent_model_save(const maxent_model* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    maxent::save_model(std::string(arg(path, "path")), model->value);
    return MAXENT_OK;
  });
}

maxent_status maxent_model_load(const char* path, maxent_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new maxent_model{maxent::load_model(std::string(arg(path, "path")))};
    return MAXENT_OK;
  });
}

maxent_status maxent_model_describe(const maxent_model* model, const char** domain, const char** structure,
                                    int* self_loops, size_t* rows, size_t* cols) {
  return guarded([&] {
    require(model, "model");
    const auto& s = model->value.structure();
    if (domain) *domain = maxent::to_string(model->value.domain()).data();
    if (structure) *structure = maxent::to_string(s.kind).data();
    if (self_loops) *self_loops = s.self_loops ? 1 : 0;
    if (rows) *rows = s.rows;
    if (cols) *cols = s.cols;
    return MAXENT_OK;
  });
}

maxent_status maxent_model_expected(const maxent_model* model, size_t i, size_t j, double* mean) {
  return guarded([&] {
    require(model, "model");
    require(mean, "mean");
    const auto& s = model->value.structure();
    if (i >= s.rows || j >= s.cols) maxent::fail(maxent::ErrorKind::Usage, "index out of range");
    const auto a = static_cast<maxent::Index>(i), b = static_cast<maxent::Index>(j);
    *mean = model->value.admissible(a, b) ? model->value.cell(a, b).mean() : 0.0;
    return MAXENT_OK;
  });
}

maxent_status maxent_model_log_prob(const maxent_model* model, const maxent_matrix* m, double* out) {
  return guarded([&] {
    require(model, "model");
    require(m, "matrix");
    require(out, "out");
    *out = maxent::log_prob(model->value, m->value);
    return MAXENT_OK;
  });
}

void maxent_model_free(maxent_model* model) { delete model; }

maxent_status maxent_sample_one(const maxent_model* model, uint64_t seed, uint64_t index, maxent_matrix** out) {
  return guarded([&] {
    require(model, "model");
    require(out, "out");
    *out = new maxent_matrix{maxent::sample_one(model->value, seed, index)};
    return MAXENT_OK;
  });
}

maxent_status maxent_sample_to_dir(const maxent_model* model, size_t count, uint64_t seed, const char* out_dir,
                                   const char* format) {
  return guarded([&] {
    require(model, "model");
    const auto f = maxent::parse_format(arg(format, "format"));
    const std::filesystem::path dir(arg(out_dir, "output directory"));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) maxent::fail(maxent::ErrorKind::Input, "cannot create '" + dir.string() + "': " + ec.message());
    for (std::size_t k = 0; k < count; ++k) {
      const auto name = "sample_" + std::to_string(k) + "." + std::string(maxent::file_extension(f));
      maxent::write_matrix_file((dir / name).string(), maxent::sample_one(model->value, seed, k), f);
    }
    return MAXENT_OK;
  });
}

maxent_status maxent_randomize(const maxent_matrix* m, size_t steps, uint64_t seed, const char* delta_mode,
                               maxent_matrix** out, size_t* accepted) {
  return guarded([&] {
    require(m, "matrix");
    require(out, "out");
    maxent::ChainSpec chain;
    chain.steps = steps;
    chain.seed = seed;
    chain.delta_mode = parse_delta_mode(arg(delta_mode, "delta mode"));
    maxent::ChainStats stats;
    *out = new maxent_matrix{maxent::randomize(m->value, chain, &stats)};
    if (accepted) *accepted = stats.accepted;
    return MAXENT_OK;
  });
}

maxent_status maxent_count_closed(const maxent_matrix* m, size_t min_support, size_t* total) {
  return guarded([&] {
    require(m, "matrix");
    require(total, "total");
    std::size_t sum = 0;
    for (const auto& [size, count] : maxent::count_closed(m->value, min_support)) sum += count;
    *total = sum;
    return MAXENT_OK;
  });
}

maxent_status maxent_assess(const maxent_matrix* m, const maxent_model* model, size_t min_support, size_t n_samples,
                            uint64_t seed, unsigned threads, maxent_report** out) {
  return guarded([&] {
    require(m, "matrix");
    require(model, "model");
    require(out, "out");
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    *out = new maxent_report{maxent::assess(m->value, model->value, min_support, n_samples, seed, threads)};
    return MAXENT_OK;
  });
}

maxent_status maxent_report_write(const maxent_report* report, const char* path) {
  return guarded([&] {
    require(report, "report");
    maxent::write_text_file(std::string(arg(path, "path")), maxent::canonical_dump(maxent::report_to_json(report->value)));
    return MAXENT_OK;
  });
}

double maxent_report_global_p(const maxent_report* report) { return report ? report->value.global_p_value : 1.0; }

void maxent_report_free(maxent_report* report) { delete report; }

maxent_status maxent_degrees(size_t n, double exponent, uint64_t seed, size_t d_max, int even_total,
                             maxent_margins** out) {
  return guarded([&] {
    require(out, "out");
    maxent::DegreeSequenceSpec spec;
    spec.n = n;
    spec.exponent = exponent;
    spec.seed = seed;
    if (d_max > 0) spec.d_max = d_max;
    spec.even_total = even_total != 0;
    *out = new maxent_margins{maxent::generate_degrees(spec)};
    return MAXENT_OK;
  });
}

}  // extern "C"
