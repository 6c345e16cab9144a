#include "maxent/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "maxent/error.hpp"

namespace maxent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::ptrdiff_t kNone = -1;

// A class of cells whose natural parameter is x[u] + x[v] (x[u] alone when
// v == kNone, 2 x[u] when v == u).
struct Block {
  std::size_t u = 0;
  std::ptrdiff_t v = kNone;
  double count = 0.0;
};

struct Problem {
  Domain domain = Domain::Binary;
  std::size_t dim = 0;
  std::vector<Block> blocks;
  std::vector<double> totals;  // multiplicity * target per multiplier
};

double block_theta(const Block& b, std::span<const double> x) {
  return b.v == kNone ? x[b.u] : x[b.u] + x[static_cast<std::size_t>(b.v)];
}

Problem build_problem(const GroupedTargets& grouped, const Structure& s, Domain domain) {
  if (grouped.symmetric != s.symmetric())
    fail(ErrorKind::Input, "grouped targets do not match the structure (symmetric vs. row/column)");
  Problem p;
  p.domain = domain;
  const auto& rg = grouped.row_groups;
  if (s.symmetric()) {
    p.dim = rg.size();
    for (std::size_t g = 0; g < rg.size(); ++g) {
      const double a = static_cast<double>(rg[g].multiplicity());
      p.totals.push_back(a * rg[g].target);
      if (s.self_loops) p.blocks.push_back({g, kNone, a});
      if (a > 1.0) p.blocks.push_back({g, static_cast<std::ptrdiff_t>(g), a * (a - 1.0) / 2.0});
      for (std::size_t h = g + 1; h < rg.size(); ++h)
        p.blocks.push_back({g, static_cast<std::ptrdiff_t>(h), a * static_cast<double>(rg[h].multiplicity())});
    }
    return p;
  }
  const auto& cg = grouped.col_groups;
  p.dim = rg.size() + cg.size();
  for (const auto& g : rg) p.totals.push_back(static_cast<double>(g.multiplicity()) * g.target);
  for (const auto& h : cg) p.totals.push_back(static_cast<double>(h.multiplicity()) * h.target);
  std::map<std::pair<std::size_t, std::size_t>, double> overlap;
  if (s.is_network() && !s.self_loops) {
    std::vector<std::size_t> col_of(s.cols, 0);
    for (std::size_t h = 0; h < cg.size(); ++h)
      for (Index j : cg[h].members) col_of.at(j) = h;
    for (std::size_t g = 0; g < rg.size(); ++g)
      for (Index i : rg[g].members) overlap[{g, col_of.at(i)}] += 1.0;
  }
  for (std::size_t g = 0; g < rg.size(); ++g)
    for (std::size_t h = 0; h < cg.size(); ++h) {
      double count = static_cast<double>(rg[g].multiplicity()) * static_cast<double>(cg[h].multiplicity());
      if (auto it = overlap.find({g, h}); it != overlap.end()) count -= it->second;
      if (count > 0.0) p.blocks.push_back({g, static_cast<std::ptrdiff_t>(rg.size() + h), count});
    }
  return p;
}

bool feasible(const Problem& p, std::span<const double> x) {
  for (const auto& b : p.blocks) {
    const double t = block_theta(b, x);
    if (!std::isfinite(t)) return false;
    if (p.domain != Domain::Binary && t >= 0.0) return false;
  }
  return true;
}

double value(const Problem& p, std::span<const double> x) {
  long double acc = 0.0L;
  for (const auto& b : p.blocks)
    acc += static_cast<long double>(b.count) * static_cast<long double>(cell_log_partition(block_theta(b, x), p.domain));
  for (std::size_t k = 0; k < p.dim; ++k) acc -= static_cast<long double>(x[k]) * static_cast<long double>(p.totals[k]);
  return static_cast<double>(acc);
}

std::vector<double> gradient(const Problem& p, std::span<const double> x) {
  std::vector<long double> acc(p.dim, 0.0L);
  for (const auto& b : p.blocks) {
    const long double w = static_cast<long double>(b.count) * cell_mean(block_theta(b, x), p.domain);
    acc[b.u] += w;
    if (b.v != kNone) acc[static_cast<std::size_t>(b.v)] += w;
  }
  std::vector<double> g(p.dim);
  for (std::size_t k = 0; k < p.dim; ++k) g[k] = static_cast<double>(acc[k] - static_cast<long double>(p.totals[k]));
  return g;
}

Eigen::MatrixXd hessian(const Problem& p, std::span<const double> x) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p.dim), static_cast<Eigen::Index>(p.dim));
  for (const auto& b : p.blocks) {
    const double w = b.count * cell_variance(block_theta(b, x), p.domain);
    const auto u = static_cast<Eigen::Index>(b.u);
    if (b.v == kNone) {
      h(u, u) += w;
    } else if (b.v == static_cast<std::ptrdiff_t>(b.u)) {
      h(u, u) += 4.0 * w;
    } else {
      const auto v = static_cast<Eigen::Index>(b.v);
      h(u, u) += w;
      h(v, v) += w;
      h(u, v) += w;
      h(v, u) += w;
    }
  }
  return h;
}

std::vector<double> hessian_diagonal(const Problem& p, std::span<const double> x) {
  std::vector<double> d(p.dim, 0.0);
  for (const auto& b : p.blocks) {
    const double w = b.count * cell_variance(block_theta(b, x), p.domain);
    if (b.v == static_cast<std::ptrdiff_t>(b.u)) {
      d[b.u] += 4.0 * w;
    } else {
      d[b.u] += w;
      if (b.v != kNone) d[static_cast<std::size_t>(b.v)] += w;
    }
  }
  return d;
}

double normalized_sq_norm(const std::vector<double>& g) {
  if (g.empty()) return 0.0;
  long double s = 0.0L;
  for (double v : g) s += static_cast<long double>(v) * v;
  return static_cast<double>(s / static_cast<long double>(g.size()));
}

// Multipliers whose margins sit on the boundary of the feasible region have
// infinite optimal values: a zero target forces every cell of the line to 0,
// and a binary target equal to the line's capacity forces every cell to 1.
// Fixing those lines can force others, so iterate to a fixed point.
struct Peeled {
  std::vector<int> fixed;  // -1: remaining cells 0, +1: remaining cells 1, 0: free
  std::vector<std::size_t> round;  // round in which the line was fixed
  std::vector<double> residual;
};

Peeled peel(const Problem& p) {
  Peeled out{std::vector<int>(p.dim, 0), std::vector<std::size_t>(p.dim, 0), p.totals};
  const bool binary = p.domain == Domain::Binary;
  bool changed = true;
  for (std::size_t round = 1; changed; ++round) {
    changed = false;
    std::vector<double> forced(p.dim, 0.0), capacity(p.dim, 0.0);
    for (const auto& b : p.blocks) {
      const int fu = out.fixed[b.u];
      const int fv = b.v == kNone ? 0 : out.fixed[static_cast<std::size_t>(b.v)];
      if (fu * fv < 0 && out.round[b.u] == out.round[static_cast<std::size_t>(b.v)])
        fail(ErrorKind::Infeasible, "margin targets force a cell to be both 0 and 1");
      const bool any_zero = fu < 0 || fv < 0;
      const bool any_full = fu > 0 || fv > 0;
      auto add = [&](std::size_t k, double occurrences) {
        if (out.fixed[k] != 0 || any_zero) return;
        (any_full ? forced : capacity)[k] += occurrences * b.count;
      };
      if (b.v == static_cast<std::ptrdiff_t>(b.u)) {
        add(b.u, 2.0);
      } else {
        add(b.u, 1.0);
        if (b.v != kNone) add(static_cast<std::size_t>(b.v), 1.0);
      }
    }
    for (std::size_t k = 0; k < p.dim; ++k) {
      if (out.fixed[k] != 0) continue;
      const double tol = 1e-9 * std::max(1.0, p.totals[k]);
      const double r = p.totals[k] - forced[k];
      out.residual[k] = r;
      if (r < -tol || (!binary && capacity[k] == 0.0 && r > tol) || (binary && r > capacity[k] + tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "margin targets are infeasible: multiplier " << k << " needs " << p.totals[k] << " but can reach "
           << forced[k] << (binary ? " .. " + std::to_string(forced[k] + capacity[k]) : std::string(" or more"));
        fail(ErrorKind::Infeasible, os.str());
      }
      if (std::abs(r) <= tol) {
        out.fixed[k] = -1;
      } else if (binary && std::abs(r - capacity[k]) <= tol) {
        out.fixed[k] = +1;
      }
      if (out.fixed[k] != 0) {
        out.round[k] = round;
        changed = true;
      }
    }
  }
  return out;
}

struct Reduced {
  Problem problem;
  std::vector<std::size_t> original;  // reduced index -> problem index
};

Reduced reduce(const Problem& p, const Peeled& peeled) {
  Reduced r;
  r.problem.domain = p.domain;
  std::vector<std::ptrdiff_t> to(p.dim, kNone);
  for (std::size_t k = 0; k < p.dim; ++k)
    if (peeled.fixed[k] == 0) {
      to[k] = static_cast<std::ptrdiff_t>(r.original.size());
      r.original.push_back(k);
      r.problem.totals.push_back(peeled.residual[k]);
    }
  r.problem.dim = r.original.size();
  for (const auto& b : p.blocks) {
    if (peeled.fixed[b.u] != 0) continue;
    if (b.v != kNone && peeled.fixed[static_cast<std::size_t>(b.v)] != 0) continue;
    Block nb{static_cast<std::size_t>(to[b.u]), b.v == kNone ? kNone : to[static_cast<std::size_t>(b.v)], b.count};
    r.problem.blocks.push_back(nb);
  }
  return r;
}

std::vector<double> initial_point(const Problem& p) {
  std::vector<double> x(p.dim, 0.0);
  if (p.domain == Domain::Binary || p.dim == 0) return x;
  // Every cell starts at the global mean target value per cell.
  double mass = 0.0, slots = 0.0;
  for (double t : p.totals) mass += t;
  for (const auto& b : p.blocks) slots += b.count * (b.v == kNone ? 1.0 : 2.0);
  const double mu = mass / slots;
  const double theta = p.domain == Domain::NonNegInteger ? std::log(mu / (1.0 + mu)) : -1.0 / mu;
  std::fill(x.begin(), x.end(), theta / 2.0);
  return x;
}

struct SolveOutcome {
  std::vector<double> x;
  FitTrace trace;
  double grad_sq_norm = 0.0;
};

SolveOutcome solve(const Problem& p, const SolverConfig& cfg) {
  SolveOutcome out;
  out.x = initial_point(p);
  auto& x = out.x;
  double f = value(p, x);
  std::vector<double> g = gradient(p, x);
  double gn = normalized_sq_norm(g);
  out.trace.records.push_back({0, f, gn, 0.0});
  out.trace.status = FitStatus::MaxIterReached;

  const double damping = 1e-10;
  std::vector<double> d(p.dim), trial(p.dim);
  for (std::size_t it = 1; it <= cfg.max_iter && gn >= cfg.tol; ++it) {
    bool have_direction = false;
    if (cfg.method == SolverMethod::Newton) {
      Eigen::MatrixXd h = hessian(p, x);
      h.diagonal().array() += damping;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success) {
        const Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
        const Eigen::VectorXd step = ldlt.solve(-gv);
        if (step.allFinite()) {
          std::copy(step.data(), step.data() + step.size(), d.begin());
          have_direction = true;
        }
      }
    }
    if (!have_direction || std::inner_product(g.begin(), g.end(), d.begin(), 0.0) >= 0.0) {
      // Jacobi preconditioner: inverse Hessian diagonal, refreshed every iteration.
      const std::vector<double> diag = hessian_diagonal(p, x);
      for (std::size_t k = 0; k < p.dim; ++k) d[k] = -g[k] / std::max(diag[k], 1e-300);
    }
    const double slope = std::inner_product(g.begin(), g.end(), d.begin(), 0.0);

    double t = 1.0;
    bool accepted = false;
    double fn = f;
    std::vector<double> gnew;
    for (int attempt = 0; attempt < 80; ++attempt, t *= cfg.line_search.shrink) {
      for (std::size_t k = 0; k < p.dim; ++k) trial[k] = x[k] + t * d[k];
      if (!feasible(p, trial)) continue;
      fn = value(p, trial);
      // Close to the optimum the decrease falls below the resolution of the
      // objective, where rounding can fake it. There, accept a step that keeps
      // the objective within rounding and clearly reduces the gradient.
      const double resolution = 1e-13 * std::max(1.0, std::abs(f));
      if (fn <= f + cfg.line_search.sufficient_decrease * t * slope && f - fn > resolution) {
        gnew = gradient(p, trial);
        accepted = true;
        break;
      }
      if (fn <= f + resolution) {
        gnew = gradient(p, trial);
        if (normalized_sq_norm(gnew) < 0.999 * gn) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
    x.swap(trial);
    f = fn;
    g = std::move(gnew);
    gn = normalized_sq_norm(g);
    out.trace.records.push_back({it, f, gn, t});
    // Multipliers drifting past the range of exp() mean the dual is unbounded:
    // the targets are not jointly realizable.
    if (std::any_of(x.begin(), x.end(), [](double v) { return std::abs(v) > 700.0; })) {
      out.trace.status = FitStatus::Infeasible;
      out.grad_sq_norm = gn;
      return out;
    }
  }
  out.grad_sq_norm = gn;
  if (gn < cfg.tol) out.trace.status = FitStatus::Converged;
  return out;
}

std::vector<TargetGroup> split_classes(const std::vector<std::tuple<std::size_t, std::size_t, Index>>& keyed,
                                       const std::vector<TargetGroup>& source, bool use_first) {
  std::vector<TargetGroup> out;
  std::pair<std::size_t, std::size_t> last{std::numeric_limits<std::size_t>::max(), 0};
  for (const auto& [rg, cg, node] : keyed) {
    if (out.empty() || last != std::pair{rg, cg}) {
      out.push_back({source[use_first ? rg : cg].target, {}});
      last = {rg, cg};
    }
    out.back().members.push_back(node);
  }
  return out;
}

}  // namespace

GroupedTargets refine_for_structure(const GroupedTargets& grouped, const Structure& s) {
  if (s.kind != StructureKind::Directed || s.self_loops) return grouped;
  std::vector<std::size_t> row_of(s.rows), col_of(s.cols);
  for (std::size_t g = 0; g < grouped.row_groups.size(); ++g)
    for (Index i : grouped.row_groups[g].members) row_of.at(i) = g;
  for (std::size_t h = 0; h < grouped.col_groups.size(); ++h)
    for (Index j : grouped.col_groups[h].members) col_of.at(j) = h;
  std::vector<std::tuple<std::size_t, std::size_t, Index>> keyed;
  for (Index i = 0; i < s.rows; ++i) keyed.emplace_back(row_of[i], col_of[i], i);
  std::sort(keyed.begin(), keyed.end());
  GroupedTargets out;
  out.symmetric = false;
  out.row_groups = split_classes(keyed, grouped.row_groups, true);
  out.col_groups = split_classes(keyed, grouped.col_groups, false);
  return out;
}

double dual_value(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                  const Structure& structure) {
  const Problem p = build_problem(grouped, structure, domain);
  if (lambdas.size() != p.dim) fail(ErrorKind::Input, "multiplier vector has the wrong length");
  return value(p, lambdas);
}

std::vector<double> dual_gradient(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                                  const Structure& structure) {
  const Problem p = build_problem(grouped, structure, domain);
  if (lambdas.size() != p.dim) fail(ErrorKind::Input, "multiplier vector has the wrong length");
  return gradient(p, lambdas);
}

Eigen::MatrixXd dual_hessian(std::span<const double> lambdas, const GroupedTargets& grouped, Domain domain,
                             const Structure& structure) {
  const Problem p = build_problem(grouped, structure, domain);
  if (lambdas.size() != p.dim) fail(ErrorKind::Input, "multiplier vector has the wrong length");
  return hessian(p, lambdas);
}

FitResult fit(const MarginTargets& targets, Domain domain, const Structure& structure, const SolverConfig& cfg) {
  if (!(cfg.tol > 0.0)) fail(ErrorKind::Usage, "solver tolerance must be positive");
  if (cfg.max_iter < 1) fail(ErrorKind::Usage, "max_iter must be at least 1");
  validate_targets(targets, domain, structure);

  GroupedTargets grouped = group_targets(targets);
  if (cfg.max_bins) grouped = bin_targets(grouped, *cfg.max_bins);
  grouped = refine_for_structure(grouped, structure);

  const Problem problem = build_problem(grouped, structure, domain);
  const Peeled peeled = peel(problem);
  const Reduced reduced = reduce(problem, peeled);
  SolveOutcome sol = solve(reduced.problem, cfg);

  std::vector<double> x(problem.dim);
  for (std::size_t k = 0; k < problem.dim; ++k) x[k] = peeled.fixed[k] < 0 ? -kInf : (peeled.fixed[k] > 0 ? kInf : 0.0);
  for (std::size_t r = 0; r < reduced.original.size(); ++r) x[reduced.original[r]] = sol.x[r];

  const std::size_t R = grouped.row_groups.size();
  if (!structure.symmetric()) {
    // Gauge: rows + c, columns - c leaves every theta unchanged. Report the
    // representative with equal member-weighted row and column sums.
    long double rsum = 0.0L, csum = 0.0L, count = 0.0L;
    for (std::size_t g = 0; g < R; ++g)
      if (std::isfinite(x[g])) {
        rsum += static_cast<long double>(x[g]) * grouped.row_groups[g].multiplicity();
        count += grouped.row_groups[g].multiplicity();
      }
    for (std::size_t h = 0; h < grouped.col_groups.size(); ++h)
      if (std::isfinite(x[R + h])) {
        csum += static_cast<long double>(x[R + h]) * grouped.col_groups[h].multiplicity();
        count += grouped.col_groups[h].multiplicity();
      }
    if (count > 0.0L) {
      const double c = static_cast<double>((csum - rsum) / count);
      for (std::size_t g = 0; g < R; ++g) x[g] += c;
      for (std::size_t h = 0; h < grouped.col_groups.size(); ++h) x[R + h] -= c;
    }
  }

  std::vector<ModelGroup> rows, cols;
  for (std::size_t g = 0; g < R; ++g)
    rows.push_back({grouped.row_groups[g].target, x[g], grouped.row_groups[g].members, peeled.round[g]});
  for (std::size_t h = 0; h < grouped.col_groups.size(); ++h)
    cols.push_back({grouped.col_groups[h].target, x[R + h], grouped.col_groups[h].members, peeled.round[R + h]});

  FitInfo info{sol.trace.records.back().iteration, sol.grad_sq_norm,
               cfg.method == SolverMethod::Newton ? "newton" : "pgd"};
  if (sol.trace.status == FitStatus::Infeasible)
    fail(ErrorKind::Infeasible, "margin targets are not jointly realizable (dual objective is unbounded)");
  return FitResult{MaxEntModel(domain, structure, std::move(rows), std::move(cols), std::move(info)),
                   std::move(sol.trace)};
}

}  // namespace maxent
