#include <algorithm>
#include <cmath>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "maxent/rng.hpp"

namespace maxent {

MarginTargets generate_degrees(const DegreeSequenceSpec& spec) {
  if (spec.n < 1) fail(ErrorKind::Usage, "degree sequence needs at least one node");
  if (!(spec.exponent > 1.0)) fail(ErrorKind::Usage, "power-law exponent must exceed 1");
  const std::size_t d_max = spec.d_max.value_or(std::max<std::size_t>(spec.n - 1, 1));
  if (d_max < 1) fail(ErrorKind::Usage, "maximum degree must be at least 1");

  std::vector<double> cdf(d_max);
  long double acc = 0.0L;
  for (std::size_t d = 1; d <= d_max; ++d) {
    acc += std::pow(static_cast<long double>(d), -static_cast<long double>(spec.exponent));
    cdf[d - 1] = static_cast<double>(acc);
  }
  const double total = cdf.back();

  Rng rng(spec.seed);
  MarginTargets out;
  out.symmetric = true;
  out.rows.reserve(spec.n);
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < spec.n; ++i) {
    const double u = rng.uniform() * total;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t d = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()) + 1, d_max);
    out.rows.push_back(static_cast<double>(d));
    sum += d;
  }
  if (spec.even_total && sum % 2 == 1) {
    // Increment one uniformly chosen degree (decrement if it is already d_max).
    const std::size_t i = rng.below(spec.n);
    if (out.rows[i] < static_cast<double>(d_max)) {
      out.rows[i] += 1.0;
    } else if (out.rows[i] > 1.0) {
      out.rows[i] -= 1.0;
    }
  }
  return out;
}

}  // namespace maxent
