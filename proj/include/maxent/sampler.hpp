#pragma once

#include <cstdint>
#include <vector>

#include "maxent/matrix.hpp"
#include "maxent/model.hpp"

namespace maxent {

struct SampleSpec {
  std::size_t count = 1;
  std::uint64_t seed = 0;
};

/// The index-th sample of a run seeded with `seed`. Cells are drawn
/// independently in row-major order over admissible cells (upper triangle for
/// undirected models), so the result depends only on (model, seed, index).
DataMatrix sample_one(const MaxEntModel& model, std::uint64_t seed, std::uint64_t index);

std::vector<DataMatrix> sample(const MaxEntModel& model, const SampleSpec& spec);

}  // namespace maxent
