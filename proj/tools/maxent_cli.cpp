// maxent_cli: fit, sample, swap-randomize and assess with maximum-entropy
// matrix models. Exit codes: 0 ok, 1 usage, 2 input/format, 3 solver did not
// converge, 4 infeasible constraints, 5 internal error.

#include <cinttypes>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "maxent/maxent.h"

namespace {

struct Failure {
  int code;
};

void check(maxent_status s) {
  if (s == MAXENT_OK) return;
  std::fprintf(stderr, "error: %s\n", maxent_last_error());
  throw Failure{static_cast<int>(s)};
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Matrix = std::unique_ptr<maxent_matrix, Deleter<maxent_matrix, maxent_matrix_free>>;
using Margins = std::unique_ptr<maxent_margins, Deleter<maxent_margins, maxent_margins_free>>;
using Model = std::unique_ptr<maxent_model, Deleter<maxent_model, maxent_model_free>>;
using Trace = std::unique_ptr<maxent_trace, Deleter<maxent_trace, maxent_trace_free>>;
using Report = std::unique_ptr<maxent_report, Deleter<maxent_report, maxent_report_free>>;

const std::vector<std::string> kFormats{"fimi", "csv", "edgelist"};
const std::vector<std::string> kDomains{"binary", "nonneg_int", "nonneg_real"};
const std::vector<std::string> kStructures{"database", "directed", "undirected"};
const std::vector<std::string> kBools{"true", "false"};

struct MatrixFlags {
  std::string input;
  std::string format = "fimi";
  std::string domain = "binary";
  std::string structure = "database";
  std::string self_loops = "false";

  void add(CLI::App* app, bool input_required) {
    auto* in = app->add_option("--input", input, "Data matrix file");
    if (input_required) in->required();
    app->add_option("--format", format, "Input format")->check(CLI::IsMember(kFormats))->capture_default_str();
    app->add_option("--domain", domain, "Value domain")->check(CLI::IsMember(kDomains))->capture_default_str();
    app->add_option("--structure", structure, "Matrix structure")
        ->check(CLI::IsMember(kStructures))
        ->capture_default_str();
    app->add_option("--self-loops", self_loops, "Allow diagonal cells in networks")
        ->check(CLI::IsMember(kBools))
        ->capture_default_str();
  }

  maxent_layout layout(size_t rows = 0, size_t cols = 0) const {
    return {domain.c_str(), structure.c_str(), self_loops == "true", rows, cols};
  }

  Matrix read(size_t rows = 0, size_t cols = 0) const {
    const auto l = layout(rows, cols);
    maxent_matrix* m = nullptr;
    check(maxent_matrix_read(input.c_str(), format.c_str(), &l, &m));
    return Matrix(m);
  }
};

Model load(const std::string& path) {
  maxent_model* m = nullptr;
  check(maxent_model_load(path.c_str(), &m));
  return Model(m);
}

// Reads data laid out like the model that will score it.
Matrix read_for_model(MatrixFlags flags, const maxent_model* model) {
  const char *domain = nullptr, *structure = nullptr;
  int self_loops = 0;
  size_t rows = 0, cols = 0;
  check(maxent_model_describe(model, &domain, &structure, &self_loops, &rows, &cols));
  flags.domain = domain;
  flags.structure = structure;
  flags.self_loops = self_loops ? "true" : "false";
  return flags.read(rows, cols);
}

std::string default_format(const maxent_model* model) {
  const char *domain = nullptr, *structure = nullptr;
  check(maxent_model_describe(model, &domain, &structure, nullptr, nullptr, nullptr));
  if (std::string(structure) != "database") return "edgelist";
  return std::string(domain) == "binary" ? "fimi" : "csv";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum-entropy models for databases and networks"};
  app.require_subcommand(1);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a model to the margins of a matrix or to a margins file");
  MatrixFlags fit_data;
  fit_data.add(fit, false);
  std::string fit_margins, fit_out, fit_trace, solver = "newton";
  double tol = 1e-12;
  size_t max_iter = 1000, max_bins = 0;
  auto* margins_opt = fit->add_option("--margins", fit_margins, "Margin targets file (instead of --input)");
  fit->get_option("--input")->excludes(margins_opt);
  fit->add_option("--out", fit_out, "Model file")->required();
  fit->add_option("--solver", solver, "Optimizer")->check(CLI::IsMember({"newton", "pgd"}))->capture_default_str();
  fit->add_option("--tol", tol, "Stop when ||grad||^2 / #multipliers falls below this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  fit->add_option("--max-iter", max_iter, "Iteration limit")->capture_default_str();
  fit->add_option("--max-bins", max_bins, "Bin distinct targets into at most this many groups")
      ->check(CLI::PositiveNumber);
  fit->add_option("--trace", fit_trace, "Write per-iteration CSV");

  // sample
  auto* smp = app.add_subcommand("sample", "Draw matrices from a fitted model");
  std::string smp_model, smp_dir, smp_format;
  size_t smp_count = 1;
  uint64_t smp_seed = 0;
  smp->add_option("--model", smp_model, "Model file")->required();
  smp->add_option("--samples", smp_count, "Number of samples")->capture_default_str();
  smp->add_option("--seed", smp_seed, "Random seed")->capture_default_str();
  smp->add_option("--out-dir", smp_dir, "Directory receiving sample_<k> files")->required();
  smp->add_option("--format", smp_format, "Output format (default by model type)")->check(CLI::IsMember(kFormats));

  // swap
  auto* swp = app.add_subcommand("swap", "Randomize a matrix with margin-preserving delta-swaps");
  MatrixFlags swp_data;
  swp_data.add(swp, true);
  std::string swp_out, delta_mode = "unit";
  size_t steps = 0;
  uint64_t swp_seed = 0;
  swp->add_option("--steps", steps, "Chain length")->required();
  swp->add_option("--seed", swp_seed, "Random seed")->capture_default_str();
  swp->add_option("--delta-mode", delta_mode, "Swap amount")
      ->check(CLI::IsMember({"unit", "integer", "real"}))
      ->capture_default_str();
  swp->add_option("--out", swp_out, "Randomized matrix file (input format)")->required();

  // assess
  auto* asx = app.add_subcommand("assess", "Compare closed itemset counts with model samples");
  MatrixFlags asx_data;
  asx_data.add(asx, true);
  std::string asx_model, asx_out;
  size_t support = 0, asx_samples = 100;
  uint64_t asx_seed = 0;
  unsigned threads = 0;
  asx->add_option("--model", asx_model, "Model file")->required();
  asx->add_option("--support", support, "Minimum support")->required()->check(CLI::PositiveNumber);
  asx->add_option("--samples", asx_samples, "Number of samples")->capture_default_str();
  asx->add_option("--seed", asx_seed, "Random seed")->capture_default_str();
  asx->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  asx->add_option("--out", asx_out, "Report file")->required();

  // degrees
  auto* deg = app.add_subcommand("degrees", "Generate a power-law degree sequence as a margins file");
  size_t n = 0, d_max = 0;
  double exponent = 2.5;
  uint64_t deg_seed = 0;
  bool even = false;
  std::string deg_out;
  deg->add_option("--n", n, "Number of nodes")->required()->check(CLI::PositiveNumber);
  deg->add_option("--exponent", exponent, "Power-law exponent")->capture_default_str();
  deg->add_option("--d-max", d_max, "Largest degree (default n - 1)");
  deg->add_option("--seed", deg_seed, "Random seed")->capture_default_str();
  deg->add_flag("--even", even, "Adjust to an even degree total");
  deg->add_option("--out", deg_out, "Margins file")->required();

  // loglik
  auto* llk = app.add_subcommand("loglik", "Print the log-probability of a matrix under a model");
  MatrixFlags llk_data;
  llk_data.add(llk, true);
  std::string llk_model;
  llk->add_option("--model", llk_model, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return MAXENT_ERR_USAGE;
  }

  try {
    if (*fit) {
      Margins targets;
      std::string structure = fit_data.structure;
      if (!fit_margins.empty()) {
        maxent_margins* t = nullptr;
        check(maxent_margins_read(fit_margins.c_str(), structure.c_str(), &t));
        targets.reset(t);
      } else {
        if (fit_data.input.empty()) {
          std::fprintf(stderr, "error: fit needs --input or --margins\n");
          return MAXENT_ERR_USAGE;
        }
        auto data = fit_data.read();
        maxent_margins* t = nullptr;
        check(maxent_margins_from_matrix(data.get(), &t));
        targets.reset(t);
      }
      maxent_fit_config config;
      maxent_fit_config_default(&config);
      config.solver = solver.c_str();
      config.tol = tol;
      config.max_iter = max_iter;
      config.max_bins = max_bins;
      maxent_model* m = nullptr;
      maxent_trace* tr = nullptr;
      const maxent_status status = maxent_fit(targets.get(), fit_data.domain.c_str(), structure.c_str(),
                                              fit_data.self_loops == "true", &config, &m, &tr);
      Model model(m);
      Trace trace(tr);
      if (status != MAXENT_OK && status != MAXENT_ERR_NOT_CONVERGED) check(status);
      if (model) check(maxent_model_save(model.get(), fit_out.c_str()));
      if (trace && !fit_trace.empty()) check(maxent_trace_write_csv(trace.get(), fit_trace.c_str()));
      if (status == MAXENT_ERR_NOT_CONVERGED) {
        std::fprintf(stderr, "error: %s; best iterate written to %s\n", maxent_last_error(), fit_out.c_str());
        return status;
      }
      std::fprintf(stderr, "converged after %zu iterations\n", maxent_trace_iterations(trace.get()));
    } else if (*smp) {
      auto model = load(smp_model);
      if (smp_format.empty()) smp_format = default_format(model.get());
      check(maxent_sample_to_dir(model.get(), smp_count, smp_seed, smp_dir.c_str(), smp_format.c_str()));
    } else if (*swp) {
      auto data = swp_data.read();
      maxent_matrix* out = nullptr;
      size_t accepted = 0;
      check(maxent_randomize(data.get(), steps, swp_seed, delta_mode.c_str(), &out, &accepted));
      Matrix result(out);
      check(maxent_matrix_write(result.get(), swp_out.c_str(), swp_data.format.c_str()));
      std::fprintf(stderr, "%zu of %zu swaps accepted\n", accepted, steps);
    } else if (*asx) {
      auto model = load(asx_model);
      auto data = read_for_model(asx_data, model.get());
      maxent_report* r = nullptr;
      check(maxent_assess(data.get(), model.get(), support, asx_samples, asx_seed, threads, &r));
      Report report(r);
      check(maxent_report_write(report.get(), asx_out.c_str()));
      std::fprintf(stderr, "global p-value %.6g\n", maxent_report_global_p(report.get()));
    } else if (*deg) {
      maxent_margins* t = nullptr;
      check(maxent_degrees(n, exponent, deg_seed, d_max, even ? 1 : 0, &t));
      Margins degrees(t);
      check(maxent_margins_write(degrees.get(), deg_out.c_str()));
    } else if (*llk) {
      auto model = load(llk_model);
      auto data = read_for_model(llk_data, model.get());
      double lp = 0.0;
      check(maxent_model_log_prob(model.get(), data.get(), &lp));
      std::printf("%.17g\n", lp);
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
