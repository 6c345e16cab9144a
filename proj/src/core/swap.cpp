#include "maxent/swap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "maxent/error.hpp"

namespace maxent {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Touched {
  Cell cell;
  int coeff = 0;
};

// Stored cells changed by the swap and the multiple of delta each receives.
std::optional<std::vector<Touched>> touched_cells(const DataMatrix& data, Index i, Index k, Index j, Index l) {
  const auto& s = data.structure();
  if (i == k || j == l) return std::nullopt;
  if (i >= s.rows || k >= s.rows || j >= s.cols || l >= s.cols) return std::nullopt;
  if (s.is_network() && !s.self_loops && (i == j || i == l || k == j || k == l)) return std::nullopt;
  const std::array<Touched, 4> pattern{{{{i, j}, +1}, {{k, l}, +1}, {{i, l}, -1}, {{k, j}, -1}}};
  std::vector<Touched> out;
  for (const auto& t : pattern) {
    Cell c = t.cell;
    int coeff = t.coeff;
    if (s.symmetric()) {
      // Stored change of S + S^T: off-diagonal pairs get S(a,b) + S(b,a), the
      // diagonal gets 2 S(a,a).
      if (c.row > c.col) std::swap(c.row, c.col);
      if (c.row == c.col) coeff *= 2;
    }
    auto it = std::find_if(out.begin(), out.end(), [&](const Touched& o) { return o.cell == c; });
    if (it == out.end()) {
      out.push_back({c, coeff});
    } else {
      it->coeff += coeff;
    }
  }
  std::erase_if(out, [](const Touched& t) { return t.coeff == 0; });
  if (out.empty()) return std::nullopt;
  return out;
}

DeltaRange range_for(const DataMatrix& data, const std::vector<Touched>& cells) {
  const double upper = data.domain() == Domain::Binary ? 1.0 : kInf;
  DeltaRange r{-kInf, kInf};
  for (const auto& t : cells) {
    const double v = data.get(t.cell.row, t.cell.col);
    const double c = t.coeff;
    // 0 <= v + c * delta <= upper
    double a = -v / c, b = (upper - v) / c;
    if (c < 0) std::swap(a, b);
    r.lo = std::max(r.lo, a);
    r.hi = std::min(r.hi, b);
  }
  return r;
}

bool integral_domain(Domain d) { return d != Domain::NonNegReal; }

bool delta_ok(const DataMatrix& data, const DeltaRange& r, double delta) {
  if (!std::isfinite(delta) || delta < r.lo || delta > r.hi) return false;
  return !integral_domain(data.domain()) || std::floor(delta) == delta;
}

void apply_unchecked(DataMatrix& data, const std::vector<Touched>& cells, double delta) {
  for (const auto& t : cells) {
    const double v = data.get(t.cell.row, t.cell.col);
    double nv = v + t.coeff * delta;
    if (nv < 0.0 && nv > -4.0 * std::numeric_limits<double>::epsilon() * std::max(v, 1.0)) nv = 0.0;
    data.set(t.cell.row, t.cell.col, nv);
  }
}

}  // namespace

std::optional<DeltaRange> allowed_delta_range(const DataMatrix& data, Index i, Index k, Index j, Index l) {
  auto cells = touched_cells(data, i, k, j, l);
  if (!cells) return std::nullopt;
  return range_for(data, *cells);
}

bool is_allowed(const DataMatrix& data, const SwapOp& op) {
  auto cells = touched_cells(data, op.row_i, op.row_k, op.col_j, op.col_l);
  return cells && delta_ok(data, range_for(data, *cells), op.delta);
}

void apply_swap(DataMatrix& data, const SwapOp& op) {
  auto cells = touched_cells(data, op.row_i, op.row_k, op.col_j, op.col_l);
  if (!cells || !delta_ok(data, range_for(data, *cells), op.delta)) {
    std::ostringstream os;
    os << "delta-swap rows (" << op.row_i << ", " << op.row_k << ") cols (" << op.col_j << ", " << op.col_l
       << ") delta " << op.delta << " is not allowed";
    fail(ErrorKind::Input, os.str());
  }
  apply_unchecked(data, *cells, op.delta);
}

bool propose_and_apply(DataMatrix& data, DeltaMode mode, Rng& rng) {
  const std::size_t m = data.rows(), n = data.cols();
  if (m < 2 || n < 2) return false;
  auto distinct_pair = [&rng](std::size_t size) {
    const auto a = static_cast<Index>(rng.below(size));
    auto b = static_cast<Index>(rng.below(size - 1));
    if (b >= a) ++b;
    return std::pair{a, b};
  };
  const auto [i, k] = distinct_pair(m);
  const auto [j, l] = distinct_pair(n);
  auto cells = touched_cells(data, i, k, j, l);
  if (!cells) return false;
  const DeltaRange r = range_for(data, *cells);

  double delta = 0.0;
  switch (mode) {
    case DeltaMode::UnitSwap: {
      const bool down = r.lo <= -1.0, up = r.hi >= 1.0;
      if (!down && !up) return false;
      delta = down && up ? (rng.below(2) == 0 ? -1.0 : 1.0) : (down ? -1.0 : 1.0);
      break;
    }
    case DeltaMode::IntegerUniform: {
      const double lo = std::ceil(r.lo), hi = std::floor(r.hi);
      const double negatives = std::max(0.0, std::min(hi, -1.0) - lo + 1.0);
      const double positives = std::max(0.0, hi - std::max(lo, 1.0) + 1.0);
      const double choices = negatives + positives;
      if (choices < 1.0) return false;
      const double pick = static_cast<double>(rng.below(static_cast<std::uint64_t>(choices)));
      delta = pick < negatives ? lo + pick : std::max(lo, 1.0) + (pick - negatives);
      break;
    }
    case DeltaMode::RealAdditionMask: {
      if (!(r.hi > r.lo)) return false;
      delta = r.lo + (r.hi - r.lo) * rng.uniform();
      if (delta == 0.0) return false;
      break;
    }
  }
  if (!delta_ok(data, r, delta)) return false;
  apply_unchecked(data, *cells, delta);
  return true;
}

DataMatrix randomize(const DataMatrix& data, const ChainSpec& chain, ChainStats* stats) {
  if (chain.steps < 1) fail(ErrorKind::Usage, "chain length must be at least 1 step");
  if (chain.delta_mode == DeltaMode::RealAdditionMask && data.domain() != Domain::NonNegReal)
    fail(ErrorKind::Usage, "real-valued delta mode requires the nonneg_real domain");
  DataMatrix out = data;
  Rng rng(chain.seed);
  ChainStats local;
  for (std::size_t step = 0; step < chain.steps; ++step) {
    if (propose_and_apply(out, chain.delta_mode, rng)) {
      ++local.accepted;
    } else {
      ++local.rejected;
    }
  }
  if (stats) *stats = local;
  return out;
}

InvarianceCheck verify_invariance(const MaxEntModel& model, DataMatrix data, std::span<const SwapOp> swaps) {
  auto diff = [](double a, double b) { return a == b ? 0.0 : std::abs(a - b); };
  const double initial = log_prob(model, data);
  double previous = initial;
  InvarianceCheck check;
  for (const auto& op : swaps) {
    apply_swap(data, op);
    const double current = log_prob(model, data);
    check.max_step_change = std::max(check.max_step_change, diff(previous, current));
    previous = current;
  }
  check.cumulative_change = diff(initial, previous);
  return check;
}

}  // namespace maxent
