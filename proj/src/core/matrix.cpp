#include "maxent/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "maxent/error.hpp"

namespace maxent {

std::string_view to_string(Domain d) {
  switch (d) {
    case Domain::Binary: return "binary";
    case Domain::NonNegInteger: return "nonneg_int";
    case Domain::NonNegReal: return "nonneg_real";
  }
  return "?";
}

std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::Database: return "database";
    case StructureKind::Directed: return "directed";
    case StructureKind::Undirected: return "undirected";
  }
  return "?";
}

Domain parse_domain(std::string_view s) {
  if (s == "binary") return Domain::Binary;
  if (s == "nonneg_int") return Domain::NonNegInteger;
  if (s == "nonneg_real") return Domain::NonNegReal;
  fail(ErrorKind::Input, "unknown domain '" + std::string(s) + "'");
}

StructureKind parse_structure(std::string_view s) {
  if (s == "database") return StructureKind::Database;
  if (s == "directed") return StructureKind::Directed;
  if (s == "undirected") return StructureKind::Undirected;
  fail(ErrorKind::Input, "unknown structure '" + std::string(s) + "'");
}

bool in_domain(double v, Domain d) {
  if (!std::isfinite(v) || v < 0.0) return false;
  switch (d) {
    case Domain::Binary: return v == 0.0 || v == 1.0;
    case Domain::NonNegInteger: return std::floor(v) == v;
    case Domain::NonNegReal: return true;
  }
  return false;
}

DataMatrix::DataMatrix(Structure structure, Domain domain) : structure_(structure), domain_(domain) {
  if (structure_.is_network() && structure_.rows != structure_.cols)
    fail(ErrorKind::Input, "network matrices must be square");
  if (structure_.kind == StructureKind::Database) structure_.self_loops = true;
}

void DataMatrix::check_bounds(Index i, Index j) const {
  if (i >= rows() || j >= cols()) {
    std::ostringstream os;
    os << "cell (" << i << ", " << j << ") outside " << rows() << "x" << cols() << " matrix";
    fail(ErrorKind::Input, os.str());
  }
}

Cell DataMatrix::canonical(Index i, Index j) const {
  if (structure_.symmetric() && i > j) return {j, i};
  return {i, j};
}

double DataMatrix::get(Index i, Index j) const {
  check_bounds(i, j);
  auto it = entries_.find(canonical(i, j));
  return it == entries_.end() ? 0.0 : it->second;
}

void DataMatrix::set(Index i, Index j, double value) {
  check_bounds(i, j);
  if (!in_domain(value, domain_)) {
    std::ostringstream os;
    os << "value " << value << " at (" << i << ", " << j << ") is outside the " << to_string(domain_) << " domain";
    fail(ErrorKind::Input, os.str());
  }
  const Cell c = canonical(i, j);
  if (value == 0.0) {
    entries_.erase(c);
    return;
  }
  if (!structure_.admissible(i, j)) {
    std::ostringstream os;
    os << "self-loop at node " << i << " but self-loops are disabled";
    fail(ErrorKind::Input, os.str());
  }
  entries_[c] = value;
}

std::vector<std::vector<Index>> DataMatrix::row_supports() const {
  std::vector<std::vector<Index>> out(rows());
  for (const auto& [cell, v] : entries_) {
    out[cell.row].push_back(cell.col);
    if (structure_.symmetric() && cell.row != cell.col) out[cell.col].push_back(cell.row);
  }
  if (structure_.symmetric())
    for (auto& r : out) std::sort(r.begin(), r.end());
  return out;
}

double MarginTargets::total() const { return std::accumulate(rows.begin(), rows.end(), 0.0); }

void validate_targets(const MarginTargets& t, Domain domain, const Structure& s) {
  if (t.symmetric != s.symmetric())
    fail(ErrorKind::Input, "margin targets do not match the matrix structure (symmetric vs. row/column)");
  if (t.rows.size() != s.rows || (!t.symmetric && t.cols.size() != s.cols)) {
    std::ostringstream os;
    os << "margin targets have " << t.rows.size() << " rows / " << t.cols.size() << " cols, structure expects "
       << s.rows << " / " << s.cols;
    fail(ErrorKind::Input, os.str());
  }
  auto check = [&](const std::vector<double>& v, const char* what, std::size_t cap) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!std::isfinite(v[i]) || v[i] < 0.0) {
        std::ostringstream os;
        os << what << " target " << i << " = " << v[i] << " is negative or not finite";
        fail(ErrorKind::Infeasible, os.str());
      }
      if (domain == Domain::Binary && v[i] > static_cast<double>(cap) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << what << " target " << i << " = " << v[i] << " exceeds the " << cap << " admissible binary cells";
        fail(ErrorKind::Infeasible, os.str());
      }
    }
  };
  check(t.rows, t.symmetric ? "degree" : "row", s.admissible_per_row());
  if (!t.symmetric) {
    check(t.cols, "column", s.admissible_per_col());
    const double rs = t.total();
    const double cs = std::accumulate(t.cols.begin(), t.cols.end(), 0.0);
    if (std::abs(rs - cs) > 1e-9 * std::max({std::abs(rs), std::abs(cs), 1e-300})) {
      std::ostringstream os;
      os.precision(17);
      os << "row targets sum to " << rs << " but column targets sum to " << cs;
      fail(ErrorKind::Infeasible, os.str());
    }
  }
}

MarginTargets compute_margins(const DataMatrix& data) {
  MarginTargets t;
  t.symmetric = data.structure().symmetric();
  t.rows.assign(data.rows(), 0.0);
  if (!t.symmetric) t.cols.assign(data.cols(), 0.0);
  for (const auto& [c, v] : data.entries()) {
    t.rows[c.row] += v;
    if (t.symmetric) {
      if (c.row != c.col) t.rows[c.col] += v;
    } else {
      t.cols[c.col] += v;
    }
  }
  return t;
}

namespace {

std::vector<TargetGroup> group_vector(const std::vector<double>& v) {
  std::vector<Index> order(v.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return v[a] < v[b]; });
  std::vector<TargetGroup> groups;
  for (Index i : order) {
    if (groups.empty() || groups.back().target != v[i]) groups.push_back({v[i], {}});
    groups.back().members.push_back(i);
  }
  return groups;
}

std::vector<TargetGroup> bin_vector(const std::vector<TargetGroup>& groups, std::size_t max_bins) {
  if (groups.size() <= max_bins) return groups;
  std::size_t total = 0;
  for (const auto& g : groups) total += g.multiplicity();
  std::vector<TargetGroup> bins;
  std::size_t begin = 0;
  std::size_t cumulative = 0;
  for (std::size_t b = 0; b < max_bins && begin < groups.size(); ++b) {
    // Close bin b once its cumulative multiplicity reaches (b+1)/max_bins of the
    // total, leaving at least one group for every remaining bin.
    const double quota = static_cast<double>(total) * static_cast<double>(b + 1) / static_cast<double>(max_bins);
    std::size_t end = begin;
    do {
      cumulative += groups[end].multiplicity();
      ++end;
    } while (end < groups.size() && static_cast<double>(cumulative) < quota &&
             groups.size() - end > max_bins - b - 1);
    if (b + 1 == max_bins) {
      for (; end < groups.size(); ++end) cumulative += groups[end].multiplicity();
    }
    long double weighted = 0.0L;
    std::size_t mult = 0;
    TargetGroup bin;
    for (std::size_t g = begin; g < end; ++g) {
      weighted += static_cast<long double>(groups[g].target) * static_cast<long double>(groups[g].multiplicity());
      mult += groups[g].multiplicity();
      bin.members.insert(bin.members.end(), groups[g].members.begin(), groups[g].members.end());
    }
    std::sort(bin.members.begin(), bin.members.end());
    bin.target = static_cast<double>(weighted / static_cast<long double>(mult));
    bins.push_back(std::move(bin));
    begin = end;
  }
  return bins;
}

}  // namespace

GroupedTargets group_targets(const MarginTargets& targets) {
  GroupedTargets g;
  g.symmetric = targets.symmetric;
  g.row_groups = group_vector(targets.rows);
  if (!targets.symmetric) g.col_groups = group_vector(targets.cols);
  return g;
}

GroupedTargets bin_targets(const GroupedTargets& grouped, std::size_t max_bins) {
  if (max_bins == 0) fail(ErrorKind::Usage, "max_bins must be at least 1");
  GroupedTargets out;
  out.symmetric = grouped.symmetric;
  out.row_groups = bin_vector(grouped.row_groups, max_bins);
  out.col_groups = bin_vector(grouped.col_groups, max_bins);
  return out;
}

std::vector<double> expand_groups(const std::vector<TargetGroup>& groups, std::size_t size) {
  std::vector<double> out(size, 0.0);
  for (const auto& g : groups)
    for (Index i : g.members) out.at(i) = g.target;
  return out;
}

}  // namespace maxent
