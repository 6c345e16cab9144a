#include "maxent/model.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <utility>

#include "maxent/error.hpp"

namespace maxent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_feasible(double theta, Domain domain) {
  if (std::isnan(theta)) fail(ErrorKind::Infeasible, "cell parameter is undefined (conflicting fixed margins)");
  if (domain != Domain::Binary && theta >= 0.0) {
    std::ostringstream os;
    os << "natural parameter " << theta << " is not negative; the " << to_string(domain)
       << " cell distribution does not normalize";
    fail(ErrorKind::Infeasible, os.str());
  }
}

bool degenerate(double theta) { return std::isinf(theta); }

}  // namespace

double cell_log_partition(double theta, Domain domain) {
  require_feasible(theta, domain);
  if (theta == -kInf) return 0.0;
  switch (domain) {
    case Domain::Binary:
      if (theta == kInf) return kInf;
      return theta > 0.0 ? theta + std::log1p(std::exp(-theta)) : std::log1p(std::exp(theta));
    case Domain::NonNegInteger: return -std::log(-std::expm1(theta));
    case Domain::NonNegReal: return -std::log(-theta);
  }
  return 0.0;
}

double cell_mean(double theta, Domain domain) {
  require_feasible(theta, domain);
  switch (domain) {
    case Domain::Binary: return 1.0 / (1.0 + std::exp(-theta));
    case Domain::NonNegInteger: return theta == -kInf ? 0.0 : 1.0 / std::expm1(-theta);
    case Domain::NonNegReal: return -1.0 / theta;
  }
  return 0.0;
}

double cell_variance(double theta, Domain domain) {
  require_feasible(theta, domain);
  switch (domain) {
    case Domain::Binary: {
      const double p = 1.0 / (1.0 + std::exp(-theta));
      const double q = 1.0 / (1.0 + std::exp(theta));
      return p * q;
    }
    case Domain::NonNegInteger: {
      if (theta == -kInf) return 0.0;
      const double m = 1.0 / std::expm1(-theta);
      return m * (1.0 + m);
    }
    case Domain::NonNegReal: return 1.0 / (theta * theta);
  }
  return 0.0;
}

double cell_log_prob(double value, double theta, Domain domain) {
  require_feasible(theta, domain);
  if (!in_domain(value, domain)) return -kInf;
  if (theta == -kInf) return value == 0.0 ? 0.0 : -kInf;
  if (theta == kInf) return value == 1.0 ? 0.0 : -kInf;
  return value * theta - cell_log_partition(theta, domain);
}

double cell_entropy(double theta, Domain domain) {
  require_feasible(theta, domain);
  if (degenerate(theta)) return 0.0;
  return cell_log_partition(theta, domain) - theta * cell_mean(theta, domain);
}

MaxEntModel::MaxEntModel(Domain domain, Structure structure, std::vector<ModelGroup> row_groups,
                         std::vector<ModelGroup> col_groups, FitInfo fit)
    : domain_(domain),
      structure_(structure),
      row_groups_(std::move(row_groups)),
      col_groups_(std::move(col_groups)),
      fit_(std::move(fit)) {
  if (structure_.kind == StructureKind::Database) structure_.self_loops = true;
  if (symmetric() && !col_groups_.empty())
    fail(ErrorKind::Input, "undirected models carry a single multiplier vector (no column groups)");

  auto index = [](const std::vector<ModelGroup>& groups, std::size_t size, const char* what) {
    std::vector<std::size_t> of(size, std::numeric_limits<std::size_t>::max());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (std::isnan(groups[g].lambda)) fail(ErrorKind::Input, std::string(what) + " multiplier is NaN");
      for (Index i : groups[g].members) {
        if (i >= size || of[i] != std::numeric_limits<std::size_t>::max()) {
          std::ostringstream os;
          os << what << " group member " << i << " is out of range or listed twice";
          fail(ErrorKind::Input, os.str());
        }
        of[i] = g;
      }
    }
    for (std::size_t i = 0; i < size; ++i)
      if (of[i] == std::numeric_limits<std::size_t>::max()) {
        std::ostringstream os;
        os << what << " " << i << " belongs to no group";
        fail(ErrorKind::Input, os.str());
      }
    return of;
  };
  row_group_of_ = index(row_groups_, structure_.rows, "row");
  if (!symmetric()) col_group_of_ = index(col_groups_, structure_.cols, "column");
  build_blocks();
}

double MaxEntModel::pair_theta(const ModelGroup& a, const ModelGroup& b) const {
  if (std::isinf(a.lambda) && std::isinf(b.lambda) && a.lambda != b.lambda) {
    if (a.fixed_order == 0 || b.fixed_order == 0 || a.fixed_order == b.fixed_order)
      return std::numeric_limits<double>::quiet_NaN();
    return a.fixed_order < b.fixed_order ? a.lambda : b.lambda;
  }
  return a.lambda + b.lambda;
}

double MaxEntModel::theta(Index i, Index j) const {
  if (symmetric() && i == j) return row_lambda(i);
  const auto& col = symmetric() ? row_groups_[row_group_of_[j]] : col_groups_[col_group_of_[j]];
  return pair_theta(row_groups_[row_group_of_[i]], col);
}

void MaxEntModel::build_blocks() {
  blocks_.clear();
  if (symmetric()) {
    for (std::size_t g = 0; g < row_groups_.size(); ++g) {
      const double a = static_cast<double>(row_groups_[g].members.size());
      const double lg = row_groups_[g].lambda;
      if (structure_.self_loops) blocks_.push_back({g, g, true, a, lg});
      if (a > 1.0) blocks_.push_back({g, g, false, a * (a - 1.0) / 2.0, pair_theta(row_groups_[g], row_groups_[g])});
      for (std::size_t h = g + 1; h < row_groups_.size(); ++h) {
        const double b = static_cast<double>(row_groups_[h].members.size());
        blocks_.push_back({g, h, false, a * b, pair_theta(row_groups_[g], row_groups_[h])});
      }
    }
  } else {
    std::map<std::pair<std::size_t, std::size_t>, double> overlap;
    if (structure_.is_network() && !structure_.self_loops)
      for (Index i = 0; i < structure_.rows; ++i) overlap[{row_group_of_[i], col_group_of_[i]}] += 1.0;
    for (std::size_t g = 0; g < row_groups_.size(); ++g) {
      const double a = static_cast<double>(row_groups_[g].members.size());
      for (std::size_t h = 0; h < col_groups_.size(); ++h) {
        double count = a * static_cast<double>(col_groups_[h].members.size());
        if (auto it = overlap.find({g, h}); it != overlap.end()) count -= it->second;
        if (count > 0.0) blocks_.push_back({g, h, false, count, pair_theta(row_groups_[g], col_groups_[h])});
      }
    }
  }
  for (const auto& b : blocks_)
    if (b.count > 0.0) require_feasible(b.theta, domain_);
}

double log_prob(const MaxEntModel& model, const DataMatrix& data) {
  if (!(data.structure() == model.structure()) || data.domain() != model.domain())
    fail(ErrorKind::Input, "data matrix does not match the model's dimensions, structure, or domain");
  const Domain d = model.domain();
  // Baseline: every admissible cell at zero; nonzero cells then add
  // log P(v) - log P(0) = v * theta.
  double total = 0.0;
  double saturated_cells = 0.0;
  for (const auto& b : model.blocks()) {
    if (b.theta == kInf) {
      saturated_cells += b.count;
    } else {
      total += b.count * cell_log_prob(0.0, b.theta, d);
    }
  }
  double saturated_hits = 0.0;
  for (const auto& [c, v] : data.entries()) {
    const double t = model.theta(c.row, c.col);
    if (t == kInf) {
      if (v != 1.0) return -kInf;
      saturated_hits += 1.0;
    } else if (t == -kInf) {
      return -kInf;
    } else {
      total += v * t;
    }
  }
  if (saturated_hits < saturated_cells) return -kInf;
  return total;
}

MarginTargets expected_margins(const MaxEntModel& model) {
  const Domain d = model.domain();
  const auto& s = model.structure();
  const auto rg = model.row_groups();
  MarginTargets out;
  out.symmetric = model.symmetric();
  out.rows.assign(s.rows, 0.0);
  if (model.symmetric()) {
    // Degree of a member of group g: its off-diagonal pairs with every other
    // node, plus its self-loop.
    std::vector<double> group_sum(rg.size(), 0.0);
    for (std::size_t g = 0; g < rg.size(); ++g) {
      for (std::size_t h = 0; h < rg.size(); ++h) {
        const double others = static_cast<double>(rg[h].members.size()) - (g == h ? 1.0 : 0.0);
        if (others > 0.0) group_sum[g] += others * cell_mean(model.group_theta(g, h), d);
      }
      if (s.self_loops) group_sum[g] += cell_mean(rg[g].lambda, d);
    }
    for (Index i = 0; i < s.rows; ++i) out.rows[i] = group_sum[model.row_group_of(i)];
    return out;
  }
  const auto cg = model.col_groups();
  const bool drop_diagonal = s.is_network() && !s.self_loops;
  out.cols.assign(s.cols, 0.0);
  // Pairs whose cells are all diagonal (excluded) have no block; skip them.
  std::vector<char> live(rg.size() * cg.size(), 0);
  for (const auto& b : model.blocks()) live[b.row_group * cg.size() + b.col_group] = 1;
  std::vector<double> row_sum(rg.size(), 0.0), col_sum(cg.size(), 0.0);
  for (std::size_t g = 0; g < rg.size(); ++g)
    for (std::size_t h = 0; h < cg.size(); ++h) {
      if (!live[g * cg.size() + h]) continue;
      const double m = cell_mean(model.group_theta(g, h), d);
      row_sum[g] += static_cast<double>(cg[h].members.size()) * m;
      col_sum[h] += static_cast<double>(rg[g].members.size()) * m;
    }
  auto diagonal_mean = [&](Index i) {
    const std::size_t g = model.row_group_of(i), h = model.col_group_of(i);
    return live[g * cg.size() + h] ? cell_mean(model.group_theta(g, h), d) : 0.0;
  };
  for (Index i = 0; i < s.rows; ++i) {
    out.rows[i] = row_sum[model.row_group_of(i)];
    if (drop_diagonal) out.rows[i] -= diagonal_mean(i);
  }
  for (Index j = 0; j < s.cols; ++j) {
    out.cols[j] = col_sum[model.col_group_of(j)];
    if (drop_diagonal) out.cols[j] -= diagonal_mean(j);
  }
  return out;
}

double entropy(const MaxEntModel& model) {
  double h = 0.0;
  for (const auto& b : model.blocks()) h += b.count * cell_entropy(b.theta, model.domain());
  return h;
}

}  // namespace maxent
