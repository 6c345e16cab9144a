#pragma once

// The fitted maximum-entropy product model: one independent exponential-family
// distribution per admissible cell, with natural parameter theta built from
// per-group Lagrange multipliers.
//
//   Binary        Bernoulli    P(1) = e^t / (1 + e^t)
//   NonNegInteger Geometric    P(k) = (1 - e^t) e^{t k},   t < 0
//   NonNegReal    Exponential  p(x) = -t e^{t x},          t < 0
//
// theta = -inf is a point mass at 0 and (Binary only) theta = +inf a point mass
// at 1; these arise for margins on the boundary of the feasible region.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "maxent/matrix.hpp"

namespace maxent {

/// log Z(theta). Throws Error(Infeasible) when theta >= 0 for Geometric/Exponential.
double cell_log_partition(double theta, Domain domain);
double cell_mean(double theta, Domain domain);
double cell_variance(double theta, Domain domain);
/// Log-probability (log-density for NonNegReal) of `value` under one cell.
double cell_log_prob(double value, double theta, Domain domain);
/// Entropy of one cell (differential entropy for NonNegReal); 0 for point masses.
double cell_entropy(double theta, Domain domain);

struct CellDistribution {
  double theta = 0.0;
  Domain domain = Domain::Binary;
  double mean() const { return cell_mean(theta, domain); }
  double variance() const { return cell_variance(theta, domain); }
  double log_prob(double value) const { return cell_log_prob(value, theta, domain); }
};

struct ModelGroup {
  double target = 0.0;
  double lambda = 0.0;
  std::vector<Index> members;  // ascending
  // For infinite multipliers, the round (from 1) in which the solver fixed
  // them. A cell between a -inf line and a +inf line takes the value forced
  // by the line fixed first.
  std::size_t fixed_order = 0;
  bool operator==(const ModelGroup&) const = default;
};

struct FitInfo {
  std::size_t iterations = 0;
  double grad_norm = 0.0;  // normalized squared gradient norm at the returned iterate
  std::string solver;
  bool operator==(const FitInfo&) const = default;
};

/// One class of cells sharing a natural parameter. For undirected models a
/// block with col_group == row_group and !diagonal holds the unordered
/// off-diagonal pairs within one group; diagonal blocks hold self-loop cells.
struct CellBlock {
  std::size_t row_group = 0;
  std::size_t col_group = 0;
  bool diagonal = false;
  double count = 0.0;
  double theta = 0.0;
};

class MaxEntModel {
 public:
  /// Undirected models pass an empty `col_groups`. Groups must partition the
  /// rows (and columns). Throws Error(Input) on malformed groups and
  /// Error(Infeasible) on a cell violating the domain's feasibility condition.
  MaxEntModel(Domain domain, Structure structure, std::vector<ModelGroup> row_groups,
              std::vector<ModelGroup> col_groups, FitInfo fit = {});

  Domain domain() const { return domain_; }
  const Structure& structure() const { return structure_; }
  std::span<const ModelGroup> row_groups() const { return row_groups_; }
  std::span<const ModelGroup> col_groups() const { return col_groups_; }
  const FitInfo& fit_info() const { return fit_; }

  std::size_t row_group_of(Index i) const { return row_group_of_[i]; }
  std::size_t col_group_of(Index j) const { return symmetric() ? row_group_of_[j] : col_group_of_[j]; }
  double row_lambda(Index i) const { return row_groups_[row_group_of_[i]].lambda; }
  double col_lambda(Index j) const {
    return symmetric() ? row_groups_[row_group_of_[j]].lambda : col_groups_[col_group_of_[j]].lambda;
  }

  bool symmetric() const { return structure_.symmetric(); }
  bool admissible(Index i, Index j) const { return structure_.admissible(i, j); }

  /// Natural parameter of cell (i, j). Undirected diagonal cells use the node's
  /// multiplier once, since a self-loop counts once toward the degree.
  double theta(Index i, Index j) const;
  CellDistribution cell(Index i, Index j) const { return {theta(i, j), domain_}; }
  /// Natural parameter of off-diagonal cells between a row group and a column
  /// group (two row groups for undirected models).
  double group_theta(std::size_t row_group, std::size_t col_group) const {
    return pair_theta(row_groups_[row_group], symmetric() ? row_groups_[col_group] : col_groups_[col_group]);
  }

  /// Admissible cells grouped by parameter, in deterministic order.
  const std::vector<CellBlock>& blocks() const { return blocks_; }

  bool operator==(const MaxEntModel& o) const {
    return domain_ == o.domain_ && structure_ == o.structure_ && row_groups_ == o.row_groups_ &&
           col_groups_ == o.col_groups_ && fit_ == o.fit_;
  }

 private:
  double pair_theta(const ModelGroup& a, const ModelGroup& b) const;
  void build_blocks();

  Domain domain_;
  Structure structure_;
  std::vector<ModelGroup> row_groups_;
  std::vector<ModelGroup> col_groups_;
  FitInfo fit_;
  std::vector<std::size_t> row_group_of_;
  std::vector<std::size_t> col_group_of_;
  std::vector<CellBlock> blocks_;
};

/// Sum of per-cell log-probabilities; undirected matrices count each unordered
/// pair once. Throws Error(Input) on shape/domain mismatch.
double log_prob(const MaxEntModel& model, const DataMatrix& data);

MarginTargets expected_margins(const MaxEntModel& model);

double entropy(const MaxEntModel& model);

}  // namespace maxent
