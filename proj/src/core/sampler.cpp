#include "maxent/sampler.hpp"

#include <cmath>
#include <limits>

#include "maxent/error.hpp"
#include "maxent/rng.hpp"

namespace maxent {
namespace {

double draw(double theta, Domain domain, Rng& rng) {
  switch (domain) {
    case Domain::Binary: {
      const double p = cell_mean(theta, domain);
      return rng.uniform() < p ? 1.0 : 0.0;
    }
    case Domain::NonNegInteger:
      // P(X >= k) = e^{theta k}
      return std::floor(std::log(rng.uniform_open()) / theta);
    case Domain::NonNegReal:
      return -std::log(rng.uniform_open()) / -theta;
  }
  return 0.0;
}

}  // namespace

DataMatrix sample_one(const MaxEntModel& model, std::uint64_t seed, std::uint64_t index) {
  const auto& s = model.structure();
  const Domain d = model.domain();
  DataMatrix out(s, d);
  Rng rng(seed, index);
  for (Index i = 0; i < s.rows; ++i) {
    const Index j0 = s.symmetric() ? i : 0;
    for (Index j = j0; j < s.cols; ++j) {
      if (!s.admissible(i, j)) continue;
      const double t = model.theta(i, j);
      if (t == -std::numeric_limits<double>::infinity()) continue;
      if (t == std::numeric_limits<double>::infinity()) {
        out.set(i, j, 1.0);
        continue;
      }
      const double v = draw(t, d, rng);
      if (v != 0.0) out.set(i, j, v);
    }
  }
  return out;
}

std::vector<DataMatrix> sample(const MaxEntModel& model, const SampleSpec& spec) {
  if (spec.count < 1) fail(ErrorKind::Usage, "sample count must be positive");
  std::vector<DataMatrix> out;
  out.reserve(spec.count);
  for (std::size_t k = 0; k < spec.count; ++k) out.push_back(sample_one(model, spec.seed, k));
  return out;
}

}  // namespace maxent
