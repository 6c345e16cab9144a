#pragma once

// Matrices representing databases and networks, their margins, and the
// distinct-value grouping of margin targets.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

namespace maxent {

using Index = std::uint32_t;

enum class Domain { Binary, NonNegInteger, NonNegReal };

enum class StructureKind { Database, Directed, Undirected };

std::string_view to_string(Domain d);
std::string_view to_string(StructureKind k);
Domain parse_domain(std::string_view s);
StructureKind parse_structure(std::string_view s);

/// True iff `v` is a member of the value domain.
bool in_domain(double v, Domain d);

struct Structure {
  StructureKind kind = StructureKind::Database;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool self_loops = true;  // meaningful for networks only

  static Structure database(std::size_t m, std::size_t n) { return {StructureKind::Database, m, n, true}; }
  static Structure directed(std::size_t n, bool self_loops) { return {StructureKind::Directed, n, n, self_loops}; }
  static Structure undirected(std::size_t n, bool self_loops) { return {StructureKind::Undirected, n, n, self_loops}; }

  bool is_network() const { return kind != StructureKind::Database; }
  bool symmetric() const { return kind == StructureKind::Undirected; }
  /// Cell (i, j) may carry a nonzero value.
  bool admissible(Index i, Index j) const { return !(is_network() && !self_loops && i == j); }
  /// Number of admissible cells in one row (= in one column).
  std::size_t admissible_per_row() const { return is_network() && !self_loops ? cols - 1 : cols; }
  std::size_t admissible_per_col() const { return is_network() && !self_loops ? rows - 1 : rows; }

  bool operator==(const Structure&) const = default;
};

struct Cell {
  Index row = 0;
  Index col = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Sparse matrix over a value domain. Absent cells are zero and zeros are never
/// stored. Undirected matrices store the upper triangle (row <= col) only and
/// mirror on read.
class DataMatrix {
 public:
  DataMatrix(Structure structure, Domain domain);

  const Structure& structure() const { return structure_; }
  Domain domain() const { return domain_; }
  std::size_t rows() const { return structure_.rows; }
  std::size_t cols() const { return structure_.cols; }
  std::size_t nonzeros() const { return entries_.size(); }

  double get(Index i, Index j) const;
  /// Throws Error(Input) when the value or position violates the domain or structure.
  void set(Index i, Index j, double value);

  /// Stored entries in row-major order (upper triangle for undirected).
  const std::map<Cell, double>& entries() const { return entries_; }

  /// Row-wise nonzero column lists, mirrored for undirected matrices.
  std::vector<std::vector<Index>> row_supports() const;

  bool operator==(const DataMatrix&) const = default;

 private:
  Cell canonical(Index i, Index j) const;
  void check_bounds(Index i, Index j) const;

  Structure structure_;
  Domain domain_;
  std::map<Cell, double> entries_;
};

/// Expected (or observed) row and column sums. Undirected networks carry a
/// single degree vector in `rows` and leave `cols` empty.
struct MarginTargets {
  std::vector<double> rows;
  std::vector<double> cols;
  bool symmetric = false;

  double total() const;
  bool operator==(const MarginTargets&) const = default;
};

/// Throws Error(Infeasible) on inconsistent totals (1e-9 relative), negative
/// targets, or binary targets exceeding the number of admissible cells; throws
/// Error(Input) on a length mismatch with the structure.
void validate_targets(const MarginTargets& targets, Domain domain, const Structure& structure);

struct TargetGroup {
  double target = 0.0;
  std::vector<Index> members;  // ascending
  std::size_t multiplicity() const { return members.size(); }
  bool operator==(const TargetGroup&) const = default;
};

struct GroupedTargets {
  std::vector<TargetGroup> row_groups;
  std::vector<TargetGroup> col_groups;  // empty when symmetric
  bool symmetric = false;

  std::size_t num_groups() const { return row_groups.size() + col_groups.size(); }
  bool operator==(const GroupedTargets&) const = default;
};

/// Row and column sums. An undirected self-loop contributes its value once to
/// the degree of its node.
MarginTargets compute_margins(const DataMatrix& data);

/// Exact-equality partition of targets, groups ascending by target value.
GroupedTargets group_targets(const MarginTargets& targets);

/// Merges groups into at most `max_bins` equal-frequency bins of contiguous
/// target values; each bin's target is the multiplicity-weighted mean.
GroupedTargets bin_targets(const GroupedTargets& grouped, std::size_t max_bins);

/// Inverse of grouping: per-index target vector of length `size`.
std::vector<double> expand_groups(const std::vector<TargetGroup>& groups, std::size_t size);

}  // namespace maxent
