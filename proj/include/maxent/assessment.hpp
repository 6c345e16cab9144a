#pragma once

// Closed frequent itemset mining and randomization assessment of mining
// results against samples from a fitted model.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "maxent/matrix.hpp"
#include "maxent/model.hpp"

namespace maxent {

struct ClosedItemset {
  std::vector<Index> items;  // ascending column indices
  std::size_t support = 0;
  bool operator==(const ClosedItemset&) const = default;
};

using SizeCounts = std::map<std::size_t, std::size_t>;

struct ClosedItemsetResult {
  std::vector<ClosedItemset> itemsets;  // lexicographic by items
  SizeCounts counts_by_size;
};

/// All nonempty closed itemsets with support >= min_support, by closure
/// extension with a prefix-preserving canonicity test. Requires a binary
/// database; throws Error(Input) otherwise.
ClosedItemsetResult mine_closed(const DataMatrix& data, std::size_t min_support);

/// Counts only (no itemset materialization).
SizeCounts count_closed(const DataMatrix& data, std::size_t min_support);

struct SizeSummary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Linear interpolation between order statistics (h = (n-1) p).
double quantile(std::vector<double> values, double p);

struct AssessmentReport {
  std::size_t min_support = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  SizeCounts original;
  std::vector<SizeCounts> samples;  // in sample-index order
  std::map<std::size_t, SizeSummary> samples_summary;
  std::map<std::size_t, double> p_values;
  double global_p_value = 1.0;
};

/// Empirical p-value (1 + #{samples >= observed}) / (1 + N).
double empirical_p_value(double observed, const std::vector<double>& sampled);

/// Mines `data` and n_samples model samples (sample k drawn with sub-stream k
/// of `seed`). Samples are mined on up to `threads` threads; the report does
/// not depend on the thread count.
AssessmentReport assess(const DataMatrix& data, const MaxEntModel& model, std::size_t min_support,
                        std::size_t n_samples, std::uint64_t seed, unsigned threads = 1);

struct DegreeSequenceSpec {
  std::size_t n = 0;
  double exponent = 2.5;
  std::uint64_t seed = 0;
  std::optional<std::size_t> d_max;  // default n - 1 (at least 1)
  bool even_total = false;           // make the total even (exact-margin swap chains need it)
};

/// n i.i.d. integer degrees from P(d) ~ d^-exponent on {1, ..., d_max}, by
/// inverse CDF. Returned as symmetric margin targets.
MarginTargets generate_degrees(const DegreeSequenceSpec& spec);

}  // namespace maxent
