#pragma once

// Fitting the model multipliers by minimizing the Lagrangian dual
//
//   L(lambda) = sum_cells log Z(theta_ij) - sum_i lambda_i^r d_i^r - sum_j lambda_j^c d_j^c
//
// over one multiplier per distinct-target group (the normalization multiplier
// is eliminated analytically). Multiplier vectors are laid out as
// [row groups..., column groups...], or [groups...] for undirected networks.

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "maxent/matrix.hpp"
#include "maxent/model.hpp"

namespace maxent {

enum class SolverMethod { Newton, PrecondGradDescent };

struct LineSearch {
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
};

struct SolverConfig {
  SolverMethod method = SolverMethod::Newton;
  double tol = 1e-12;  // threshold on ||g||^2 / (number of free multipliers)
  std::size_t max_iter = 1000;
  LineSearch line_search;
  std::optional<std::size_t> max_bins;
};

enum class FitStatus { Converged, MaxIterReached, Infeasible };

struct IterationRecord {
  std::size_t iteration = 0;
  double dual = 0.0;
  double grad_sq_norm = 0.0;  // normalized
  double step = 0.0;
};

struct FitTrace {
  std::vector<IterationRecord> records;
  FitStatus status = FitStatus::MaxIterReached;
};

struct FitResult {
  MaxEntModel model;
  FitTrace trace;
};

double dual_value(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                  const Structure& structure);
std::vector<double> dual_gradient(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                                  const Structure& structure);
Eigen::MatrixXd dual_hessian(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                             const Structure& structure);

/// Fits a model to margin targets. Infeasible targets throw Error(Infeasible);
/// hitting max_iter returns the best iterate with status MaxIterReached.
FitResult fit(const MarginTargets& targets, Domain domain, const Structure& structure,
              const SolverConfig& config = {});

/// Directed networks without self-loops exclude each node's diagonal cell, so
/// nodes sharing an out-degree but not an in-degree are not interchangeable.
/// Splits groups into classes of nodes sharing both targets, ordered by
/// (row target, column target); other structures are returned unchanged.
GroupedTargets refine_for_structure(const GroupedTargets& grouped, const Structure& structure);

}  // namespace maxent
