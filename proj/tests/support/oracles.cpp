#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace oracle {

std::vector<maxent::ClosedItemset> closed_itemsets(const maxent::DataMatrix& data, std::size_t min_support) {
  const std::size_t m = data.rows(), n = data.cols();
  std::vector<std::uint32_t> row_bits(m, 0);
  for (const auto& [c, v] : data.entries()) row_bits[c.row] |= 1u << c.col;
  std::vector<std::size_t> support(std::size_t{1} << n, 0);
  for (std::uint32_t s = 0; s < support.size(); ++s)
    for (auto r : row_bits)
      if ((r & s) == s) ++support[s];

  std::vector<maxent::ClosedItemset> out;
  for (std::uint32_t s = 1; s < support.size(); ++s) {
    if (support[s] < min_support) continue;
    bool closed = true;
    for (std::size_t j = 0; j < n && closed; ++j)
      if (!(s >> j & 1u) && support[s | 1u << j] == support[s]) closed = false;
    if (!closed) continue;
    maxent::ClosedItemset c;
    for (std::size_t j = 0; j < n; ++j)
      if (s >> j & 1u) c.items.push_back(static_cast<maxent::Index>(j));
    c.support = support[s];
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.items < b.items; });
  return out;
}

maxent::DataMatrix binary_matrix(std::size_t m, std::size_t n, std::uint32_t bits) {
  maxent::DataMatrix d(maxent::Structure::database(m, n), maxent::Domain::Binary);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (bits >> (i * n + j) & 1u) d.set(static_cast<maxent::Index>(i), static_cast<maxent::Index>(j), 1.0);
  return d;
}

std::vector<double> outcome_maxent(std::size_t m, std::size_t n, const maxent::MarginTargets& targets) {
  const std::size_t outcomes = std::size_t{1} << (m * n);
  const std::size_t k = m + n;
  Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(outcomes, k);
  for (std::size_t x = 0; x < outcomes; ++x)
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double b = (x >> (i * n + j)) & 1u;
        phi(x, i) += b;
        phi(x, m + j) += b;
      }
  Eigen::VectorXd t(k);
  for (std::size_t i = 0; i < m; ++i) t(i) = targets.rows[i];
  for (std::size_t j = 0; j < n; ++j) t(m + j) = targets.cols[j];

  // A target equal to the smallest or largest value of its statistic over the
  // support pins the statistic there with probability one.
  std::vector<char> alive(outcomes, 1);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t f = 0; f < k; ++f) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t x = 0; x < outcomes; ++x)
        if (alive[x]) lo = std::min(lo, phi(x, f)), hi = std::max(hi, phi(x, f));
      if (lo == hi) continue;
      double pin;
      if (t(f) <= lo + 1e-12) {
        pin = lo;
      } else if (t(f) >= hi - 1e-12) {
        pin = hi;
      } else {
        continue;
      }
      for (std::size_t x = 0; x < outcomes; ++x)
        if (alive[x] && phi(x, f) != pin) alive[x] = 0, changed = true;
    }
  }
  std::vector<std::size_t> support;
  for (std::size_t x = 0; x < outcomes; ++x)
    if (alive[x]) support.push_back(x);
  if (support.empty()) throw std::runtime_error("infeasible targets");

  auto distribution = [&](const Eigen::VectorXd& lambda, double* log_z) {
    Eigen::VectorXd s(support.size());
    for (std::size_t a = 0; a < support.size(); ++a) s(a) = phi.row(support[a]).dot(lambda);
    const double top = s.maxCoeff();
    Eigen::VectorXd p = (s.array() - top).exp();
    const double z = p.sum();
    if (log_z) *log_z = top + std::log(z);
    return Eigen::VectorXd(p / z);
  };
  auto objective = [&](const Eigen::VectorXd& lambda) {
    double log_z = 0.0;
    distribution(lambda, &log_z);
    return log_z - lambda.dot(t);
  };

  Eigen::VectorXd lambda = Eigen::VectorXd::Zero(k);
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::VectorXd p = distribution(lambda, nullptr);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(k, k);
    for (std::size_t a = 0; a < support.size(); ++a) {
      const Eigen::VectorXd f = phi.row(support[a]).transpose();
      mean += p(a) * f;
      second += p(a) * f * f.transpose();
    }
    const Eigen::VectorXd g = mean - t;
    if (g.cwiseAbs().maxCoeff() < 1e-14) break;
    const Eigen::MatrixXd h = second - mean * mean.transpose();
    const Eigen::VectorXd step = h.completeOrthogonalDecomposition().solve(-g);
    const double f0 = objective(lambda);
    double a = 1.0;
    while (a > 1e-12 && objective(lambda + a * step) > f0 + 1e-4 * a * g.dot(step)) a *= 0.5;
    if (a <= 1e-12) break;
    lambda += a * step;
  }

  std::vector<double> out(outcomes, 0.0);
  const Eigen::VectorXd p = distribution(lambda, nullptr);
  for (std::size_t a = 0; a < support.size(); ++a) out[support[a]] = p(a);
  return out;
}

std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + h;
    const double up = f(x);
    x[i] = xi - h;
    const double down = f(x);
    x[i] = xi;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

}  // namespace oracle
