#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "maxent/sampler.hpp"

namespace maxent {

double quantile(std::vector<double> values, double p) {
  if (values.empty()) fail(ErrorKind::Usage, "quantile of an empty sample");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

double empirical_p_value(double observed, const std::vector<double>& sampled) {
  const auto at_least = std::count_if(sampled.begin(), sampled.end(), [&](double s) { return s >= observed; });
  return (1.0 + static_cast<double>(at_least)) / (1.0 + static_cast<double>(sampled.size()));
}

AssessmentReport assess(const DataMatrix& data, const MaxEntModel& model, std::size_t min_support,
                        std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) fail(ErrorKind::Usage, "assessment needs at least one sample");
  if (data.structure() != model.structure() || data.domain() != model.domain())
    fail(ErrorKind::Input, "data matrix does not match the model's shape and domain");
  AssessmentReport report;
  report.min_support = min_support;
  report.n_samples = n_samples;
  report.seed = seed;
  report.original = count_closed(data, min_support);
  report.samples.assign(n_samples, {});

  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < n_samples; k = next++) {
      try {
        report.samples[k] = count_closed(sample_one(model, seed, k), min_support);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n_samples;
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_samples)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::set<std::size_t> sizes;
  for (const auto& [size, count] : report.original) sizes.insert(size);
  for (const auto& s : report.samples)
    for (const auto& [size, count] : s) sizes.insert(size);

  auto lookup = [](const SizeCounts& c, std::size_t size) {
    auto it = c.find(size);
    return it == c.end() ? 0.0 : static_cast<double>(it->second);
  };
  for (std::size_t size : sizes) {
    std::vector<double> values;
    for (const auto& s : report.samples) values.push_back(lookup(s, size));
    report.samples_summary[size] = {*std::min_element(values.begin(), values.end()), quantile(values, 0.25),
                                    quantile(values, 0.5), quantile(values, 0.75),
                                    *std::max_element(values.begin(), values.end())};
    report.p_values[size] = empirical_p_value(lookup(report.original, size), values);
  }
  auto total = [](const SizeCounts& c) {
    double t = 0.0;
    for (const auto& [size, count] : c) t += static_cast<double>(count);
    return t;
  };
  std::vector<double> totals;
  for (const auto& s : report.samples) totals.push_back(total(s));
  report.global_p_value = empirical_p_value(total(report.original), totals);
  return report;
}

}  // namespace maxent
