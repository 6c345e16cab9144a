#pragma once

// Delta-swaps: add delta to cells (i,j) and (k,l), subtract it from (i,l) and
// (k,j). Row and column sums are unchanged, and so is the probability of the
// matrix under any fitted model. Undirected matrices apply the mirrored swap in
// the same step (the change is S + S^T), which keeps them symmetric.

#include <cstdint>
#include <optional>
#include <span>

#include "maxent/matrix.hpp"
#include "maxent/model.hpp"
#include "maxent/rng.hpp"

namespace maxent {

struct SwapOp {
  Index row_i = 0;
  Index row_k = 0;
  Index col_j = 0;
  Index col_l = 0;
  double delta = 0.0;
};

enum class DeltaMode { UnitSwap, IntegerUniform, RealAdditionMask };

struct ChainSpec {
  std::size_t steps = 1;
  std::uint64_t seed = 0;
  DeltaMode delta_mode = DeltaMode::UnitSwap;
};

struct ChainStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

/// Closed interval of deltas keeping all touched cells inside the domain
/// (before integrality for integer domains). Empty when the index pattern is
/// not a valid swap for the structure (repeated rows/cols, or touching the
/// diagonal of a network without self-loops).
struct DeltaRange {
  double lo = 0.0;
  double hi = 0.0;
};
std::optional<DeltaRange> allowed_delta_range(const DataMatrix& data, Index i, Index k, Index j, Index l);

bool is_allowed(const DataMatrix& data, const SwapOp& op);

/// Throws Error(Input) if the swap is not allowed.
void apply_swap(DataMatrix& data, const SwapOp& op);

/// One chain step: propose uniformly, apply if allowed. Returns acceptance.
bool propose_and_apply(DataMatrix& data, DeltaMode mode, Rng& rng);

DataMatrix randomize(const DataMatrix& data, const ChainSpec& chain, ChainStats* stats = nullptr);

struct InvarianceCheck {
  double max_step_change = 0.0;   // max |log P(before) - log P(after)| over single swaps
  double cumulative_change = 0.0; // |log P(final) - log P(initial)|
};

/// Applies `swaps` in order, recomputing log_prob after each. Throws
/// Error(Input) on a disallowed swap.
InvarianceCheck verify_invariance(const MaxEntModel& model, DataMatrix data, std::span<const SwapOp> swaps);

}  // namespace maxent
