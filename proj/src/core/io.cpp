#include "maxent/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "maxent/error.hpp"

namespace maxent {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << "line " << line << ": " << what;
  fail(ErrorKind::Input, os.str());
}

Index parse_index(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v >= std::numeric_limits<Index>::max())
    parse_error(line, "expected a non-negative integer id, got '" + std::string(tok) + "'");
  return static_cast<Index>(v);
}

double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(v))
    parse_error(line, "expected a number, got '" + std::string(tok) + "'");
  return v;
}

Structure resolve(const MatrixLayout& layout, std::size_t rows, std::size_t cols) {
  auto pick = [](std::size_t given, std::size_t inferred, const char* what) {
    if (given == 0) return inferred;
    if (inferred > given) {
      std::ostringstream os;
      os << "file needs " << inferred << " " << what << " but the layout allows " << given;
      fail(ErrorKind::Input, os.str());
    }
    return given;
  };
  switch (layout.kind) {
    case StructureKind::Database:
      return Structure::database(pick(layout.rows, rows, "rows"), pick(layout.cols, cols, "columns"));
    case StructureKind::Directed:
    case StructureKind::Undirected: {
      const std::size_t n = pick(std::max(layout.rows, layout.cols), std::max(rows, cols), "nodes");
      return layout.kind == StructureKind::Directed ? Structure::directed(n, layout.self_loops)
                                                    : Structure::undirected(n, layout.self_loops);
    }
  }
  return {};
}

DataMatrix read_fimi(std::istream& in, const MatrixLayout& layout) {
  if (layout.domain != Domain::Binary || layout.kind != StructureKind::Database)
    fail(ErrorKind::Input, "FIMI files hold binary databases only");
  std::vector<std::vector<Index>> rows;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<Index> items;
    for (auto tok : split_ws(line)) {
      items.push_back(parse_index(tok, rows.size() + 1));
      cols = std::max<std::size_t>(cols, items.back() + 1);
    }
    rows.push_back(std::move(items));
  }
  DataMatrix m(resolve(layout, rows.size(), cols), Domain::Binary);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (Index j : rows[i]) m.set(static_cast<Index>(i), j, 1.0);
  return m;
}

DataMatrix read_csv(std::istream& in, const MatrixLayout& layout) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    std::vector<double> r;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      r.push_back(parse_number(trim(t.substr(start, comma - start)), lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && r.size() != rows.front().size())
      parse_error(lineno, "row has " + std::to_string(r.size()) + " values, expected " +
                              std::to_string(rows.front().size()));
    rows.push_back(std::move(r));
  }
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  const Structure s = resolve(layout, rows.size(), cols);
  if (s.is_network() && rows.size() != cols && !rows.empty())
    fail(ErrorKind::Input, "network adjacency CSV must be square");
  DataMatrix m(s, layout.domain);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      const double v = rows[i][j];
      if (s.symmetric()) {
        if (v != rows.at(j).at(i)) parse_error(i + 1, "undirected adjacency matrix is not symmetric");
        if (j < i) continue;
      }
      m.set(static_cast<Index>(i), static_cast<Index>(j), v);
    }
  return m;
}

DataMatrix read_edgelist(std::istream& in, const MatrixLayout& layout) {
  struct Edge {
    Index u, v;
    double w;
    std::size_t line;
  };
  std::vector<Edge> edges;
  std::size_t rows = 0, cols = 0, declared = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto toks = split_ws(t.substr(1));
      if (toks.size() == 2 && toks[0] == "nodes") declared = parse_index(toks[1], lineno);
      if (toks.size() == 3 && toks[0] == "shape") {
        rows = std::max<std::size_t>(rows, parse_index(toks[1], lineno));
        cols = std::max<std::size_t>(cols, parse_index(toks[2], lineno));
      }
      continue;
    }
    const auto toks = split_ws(t);
    if (toks.size() != 2 && toks.size() != 3) parse_error(lineno, "expected 'u v' or 'u v w'");
    Edge e{parse_index(toks[0], lineno), parse_index(toks[1], lineno),
           toks.size() == 3 ? parse_number(toks[2], lineno) : 1.0, lineno};
    rows = std::max<std::size_t>(rows, e.u + 1);
    cols = std::max<std::size_t>(cols, e.v + 1);
    edges.push_back(e);
  }
  if (layout.kind != StructureKind::Database) rows = cols = std::max({rows, cols, declared});
  DataMatrix m(resolve(layout, rows, cols), layout.domain);
  std::set<Cell> seen;
  for (const auto& e : edges) {
    Cell c{e.u, e.v};
    if (m.structure().symmetric() && c.row > c.col) std::swap(c.row, c.col);
    if (!seen.insert(c).second) parse_error(e.line, "duplicate edge");
    m.set(e.u, e.v, e.w);
  }
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Input, "cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Input, "cannot open '" + path + "'");
  return in;
}

json lambda_to_json(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  return v;
}

double lambda_from_json(const json& j) {
  if (j.is_string()) {
    if (j == "inf") return std::numeric_limits<double>::infinity();
    if (j == "-inf") return -std::numeric_limits<double>::infinity();
    fail(ErrorKind::Input, "model file: bad multiplier '" + j.get<std::string>() + "'");
  }
  return j.get<double>();
}

json groups_to_json(std::span<const ModelGroup> groups) {
  json arr = json::array();
  for (const auto& g : groups) {
    json o = {{"target", g.target}, {"lambda", lambda_to_json(g.lambda)}, {"members", g.members}};
    if (g.fixed_order > 0) o["fixed_order"] = g.fixed_order;
    arr.push_back(std::move(o));
  }
  return arr;
}

std::vector<ModelGroup> groups_from_json(const json& arr) {
  std::vector<ModelGroup> out;
  for (const auto& g : arr)
    out.push_back({g.at("target").get<double>(), lambda_from_json(g.at("lambda")),
                   g.at("members").get<std::vector<Index>>(), g.value("fixed_order", std::size_t{0})});
  return out;
}

}  // namespace

FileFormat parse_format(std::string_view s) {
  if (s == "fimi") return FileFormat::Fimi;
  if (s == "csv") return FileFormat::Csv;
  if (s == "edgelist") return FileFormat::EdgeList;
  fail(ErrorKind::Usage, "unknown format '" + std::string(s) + "'");
}

std::string_view to_string(FileFormat f) {
  switch (f) {
    case FileFormat::Fimi: return "fimi";
    case FileFormat::Csv: return "csv";
    case FileFormat::EdgeList: return "edgelist";
  }
  return "?";
}

std::string_view file_extension(FileFormat f) {
  switch (f) {
    case FileFormat::Fimi: return "dat";
    case FileFormat::Csv: return "csv";
    case FileFormat::EdgeList: return "edges";
  }
  return "txt";
}

DataMatrix read_matrix(std::istream& in, FileFormat format, const MatrixLayout& layout) {
  switch (format) {
    case FileFormat::Fimi: return read_fimi(in, layout);
    case FileFormat::Csv: return read_csv(in, layout);
    case FileFormat::EdgeList: return read_edgelist(in, layout);
  }
  fail(ErrorKind::Usage, "unknown format");
}

DataMatrix read_matrix_file(const std::string& path, FileFormat format, const MatrixLayout& layout) {
  auto in = open_in(path);
  try {
    return read_matrix(in, format, layout);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const DataMatrix& data, FileFormat format) {
  switch (format) {
    case FileFormat::Fimi: {
      if (data.domain() != Domain::Binary || data.structure().kind != StructureKind::Database)
        fail(ErrorKind::Input, "FIMI files hold binary databases only");
      const auto supports = data.row_supports();
      for (const auto& row : supports) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << row[k];
        out << '\n';
      }
      break;
    }
    case FileFormat::Csv: {
      for (Index i = 0; i < data.rows(); ++i) {
        for (Index j = 0; j < data.cols(); ++j) out << (j ? "," : "") << fmt17(data.get(i, j));
        out << '\n';
      }
      break;
    }
    case FileFormat::EdgeList: {
      if (data.structure().is_network()) {
        out << "# nodes " << data.rows() << '\n';
      } else {
        out << "# shape " << data.rows() << ' ' << data.cols() << '\n';
      }
      for (const auto& [c, v] : data.entries()) {
        out << c.row << ' ' << c.col;
        if (data.domain() != Domain::Binary) out << ' ' << fmt17(v);
        out << '\n';
      }
      break;
    }
  }
}

void write_matrix_file(const std::string& path, const DataMatrix& data, FileFormat format) {
  auto out = open_out(path);
  write_matrix(out, data, format);
}

MarginTargets read_margins(std::istream& in, StructureKind kind) {
  std::vector<double> first, second;
  bool in_second = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    if (t == "---") {
      if (in_second) parse_error(lineno, "more than two margin sections");
      in_second = true;
      continue;
    }
    (in_second ? second : first).push_back(parse_number(t, lineno));
  }
  MarginTargets m;
  if (kind == StructureKind::Undirected) {
    if (in_second) fail(ErrorKind::Input, "undirected margins take a single degree section");
    m.symmetric = true;
    m.rows = std::move(first);
    return m;
  }
  if (!in_second) {
    if (kind == StructureKind::Database) fail(ErrorKind::Input, "database margins need row and column sections");
    second = first;
  }
  m.rows = std::move(first);
  m.cols = std::move(second);
  return m;
}

MarginTargets read_margins_file(const std::string& path, StructureKind kind) {
  auto in = open_in(path);
  try {
    return read_margins(in, kind);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_margins(std::ostream& out, const MarginTargets& targets) {
  for (double v : targets.rows) out << fmt17(v) << '\n';
  if (!targets.symmetric) {
    out << "---\n";
    for (double v : targets.cols) out << fmt17(v) << '\n';
  }
}

json model_to_json(const MaxEntModel& model) {
  const auto& s = model.structure();
  json j = {
      {"version", 1},
      {"domain", std::string(to_string(model.domain()))},
      {"structure", std::string(to_string(s.kind))},
      {"self_loops", s.self_loops},
      {"m", s.rows},
      {"n", s.cols},
      {"row_groups", groups_to_json(model.row_groups())},
      {"fit",
       {{"iterations", model.fit_info().iterations},
        {"grad_norm", model.fit_info().grad_norm},
        {"solver", model.fit_info().solver}}},
  };
  if (!model.symmetric()) j["col_groups"] = groups_to_json(model.col_groups());
  return j;
}

MaxEntModel model_from_json(const json& j) {
  try {
    if (j.at("version").get<int>() != 1) fail(ErrorKind::Input, "unsupported model file version");
    const Domain domain = parse_domain(j.at("domain").get<std::string>());
    const StructureKind kind = parse_structure(j.at("structure").get<std::string>());
    const bool self_loops = j.at("self_loops").get<bool>();
    const auto m = j.at("m").get<std::size_t>(), n = j.at("n").get<std::size_t>();
    Structure s;
    switch (kind) {
      case StructureKind::Database: s = Structure::database(m, n); break;
      case StructureKind::Directed: s = Structure::directed(n, self_loops); break;
      case StructureKind::Undirected: s = Structure::undirected(n, self_loops); break;
    }
    if (s.rows != m) fail(ErrorKind::Input, "network model must be square");
    std::vector<ModelGroup> cols;
    if (kind != StructureKind::Undirected) cols = groups_from_json(j.at("col_groups"));
    FitInfo info;
    const auto& f = j.at("fit");
    info.iterations = f.at("iterations").get<std::size_t>();
    info.grad_norm = f.at("grad_norm").get<double>();
    info.solver = f.at("solver").get<std::string>();
    return MaxEntModel(domain, s, groups_from_json(j.at("row_groups")), std::move(cols), std::move(info));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::string& path, const MaxEntModel& model) {
  write_text_file(path, canonical_dump(model_to_json(model)));
}

MaxEntModel load_model(const std::string& path) {
  auto in = open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Input, path + ": " + e.what());
  }
  try {
    return model_from_json(j);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

json report_to_json(const AssessmentReport& r) {
  json original = json::object(), summary = json::object(), p = json::object();
  for (const auto& [size, count] : r.original) original[std::to_string(size)] = count;
  for (const auto& [size, s] : r.samples_summary)
    summary[std::to_string(size)] = {{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
  for (const auto& [size, v] : r.p_values) p[std::to_string(size)] = v;
  p["global"] = r.global_p_value;
  return {{"min_support", r.min_support}, {"n_samples", r.n_samples}, {"seed", r.seed},
          {"original", original},         {"samples_summary", summary}, {"p_values", p}};
}

void write_trace_csv(std::ostream& out, const FitTrace& trace) {
  out << "iteration,dual,grad_sq_norm,step\n";
  for (const auto& r : trace.records)
    out << r.iteration << ',' << fmt17(r.dual) << ',' << fmt17(r.grad_sq_norm) << ',' << fmt17(r.step) << '\n';
}

void write_text_file(const std::string& path, std::string_view contents) {
  auto out = open_out(path);
  out << contents;
  if (!out) fail(ErrorKind::Input, "failed writing '" + path + "'");
}

}  // namespace maxent
