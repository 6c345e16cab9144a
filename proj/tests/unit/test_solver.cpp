#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "maxent/solver.hpp"
#include "oracles.hpp"

using namespace maxent;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

GroupedTargets singletons(const MarginTargets& t) {
  GroupedTargets g;
  g.symmetric = t.symmetric;
  for (Index i = 0; i < t.rows.size(); ++i) g.row_groups.push_back({t.rows[i], {i}});
  for (Index j = 0; j < t.cols.size(); ++j) g.col_groups.push_back({t.cols[j], {j}});
  return g;
}

// Multipliers for grouped targets, expanded to one multiplier per index.
std::vector<double> ungroup(std::span<const double> x, const GroupedTargets& g, std::size_t m, std::size_t n) {
  const std::size_t rg = g.row_groups.size();
  std::vector<double> out(m + (g.symmetric ? 0 : n));
  for (std::size_t a = 0; a < rg; ++a)
    for (Index i : g.row_groups[a].members) out[i] = x[a];
  for (std::size_t b = 0; b < g.col_groups.size(); ++b)
    for (Index j : g.col_groups[b].members) out[m + j] = x[rg + b];
  return out;
}

void check_margins(const FitResult& r, const MarginTargets& t, double rel = 1e-6) {
  const auto e = expected_margins(r.model);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    CHECK(std::abs(e.rows[i] - t.rows[i]) / std::max(t.rows[i], 1.0) < rel);
  for (std::size_t j = 0; j < t.cols.size(); ++j)
    CHECK(std::abs(e.cols[j] - t.cols[j]) / std::max(t.cols[j], 1.0) < rel);
}

}  // namespace

TEST_CASE("dual value at small instances") {
  const auto s11 = Structure::database(1, 1);
  const auto g = group_targets({{0.5}, {0.5}, false});
  const std::vector<double> zero2{0, 0};
  CHECK(dual_value(zero2, g, Domain::Binary, s11) == doctest::Approx(0.693147).epsilon(1e-6));
  const auto grad = dual_gradient(zero2, g, Domain::Binary, s11);
  CHECK(grad[0] == doctest::Approx(0.0));
  CHECK(grad[1] == doctest::Approx(0.0));

  const auto g22 = singletons({{1, 1}, {1, 1}, false});
  const std::vector<double> zero4(4, 0.0);
  CHECK(dual_value(zero4, g22, Domain::Binary, Structure::database(2, 2)) == doctest::Approx(2.772589).epsilon(1e-6));
}

TEST_CASE("hessian at zero for a 2x2 binary problem") {
  const auto g = singletons({{1, 1}, {1, 1}, false});
  const std::vector<double> zero(4, 0.0);
  const auto h = dual_hessian(zero, g, Domain::Binary, Structure::database(2, 2));
  for (int a = 0; a < 2; ++a) {
    CHECK(h(a, a) == doctest::Approx(0.5));
    CHECK(h(2 + a, 2 + a) == doctest::Approx(0.5));
    CHECK(h(0, 1) == doctest::Approx(0.0));
    for (int b = 0; b < 2; ++b) CHECK(h(a, 2 + b) == doctest::Approx(0.25));
  }
}

TEST_CASE("grouped and ungrouped dual agree") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.5, 0.5);
  const MarginTargets t{{2, 2, 1, 2, 3}, {3, 1, 3, 3}, false};
  const auto s = Structure::database(5, 4);
  const auto grouped = group_targets(t);
  const auto flat = singletons(t);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(grouped.num_groups());
    for (double& v : x) v = u(gen);
    const auto full = ungroup(x, grouped, 5, 4);
    CHECK(dual_value(x, grouped, Domain::Binary, s) ==
          doctest::Approx(dual_value(full, flat, Domain::Binary, s)).epsilon(1e-12));
  }
}

TEST_CASE("gradient and hessian match finite differences") {
  std::mt19937_64 gen(11);
  struct Case {
    Domain domain;
    Structure structure;
    MarginTargets targets;
  };
  const std::vector<Case> cases{
      {Domain::Binary, Structure::database(4, 3), {{1, 2, 2, 1}, {2, 2, 2}, false}},
      {Domain::NonNegInteger, Structure::directed(4, false), {{1, 3, 2, 6}, {4, 4, 2, 2}, false}},
      {Domain::NonNegReal, Structure::undirected(5, true), {{1.5, 2, 2, 0.5, 3}, {}, true}},
      {Domain::Binary, Structure::undirected(5, false), {{1, 2, 2, 3, 2}, {}, true}},
  };
  for (const auto& c : cases) {
    const auto g = refine_for_structure(group_targets(c.targets), c.structure);
    std::uniform_real_distribution<double> u(c.domain == Domain::Binary ? -2.0 : -2.0,
                                             c.domain == Domain::Binary ? 2.0 : -0.2);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x(g.num_groups());
      for (double& v : x) v = u(gen);
      auto f = [&](std::span<const double> y) { return dual_value(y, g, c.domain, c.structure); };
      const auto grad = dual_gradient(x, g, c.domain, c.structure);
      const auto fd = oracle::central_gradient(f, x, 1e-5);
      for (std::size_t k = 0; k < x.size(); ++k) CHECK(grad[k] == doctest::Approx(fd[k]).epsilon(1e-6));

      const auto h = dual_hessian(x, g, c.domain, c.structure);
      for (std::size_t k = 0; k < x.size(); ++k) {
        auto gk = [&](std::span<const double> y) { return dual_gradient(y, g, c.domain, c.structure)[k]; };
        const auto row = oracle::central_gradient(gk, x, 1e-5);
        for (std::size_t l = 0; l < x.size(); ++l) CHECK(h(k, l) == doctest::Approx(row[l]).epsilon(1e-4));
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("fit on symmetric 2x2 margins gives cell means of one half") {
  const auto r = fit({{1, 1}, {1, 1}, false}, Domain::Binary, Structure::database(2, 2));
  CHECK(r.trace.status == FitStatus::Converged);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      CHECK(r.model.cell(i, j).mean() == doctest::Approx(0.5));
      CHECK(r.model.row_lambda(i) + r.model.col_lambda(j) == doctest::Approx(0.0).scale(1));
    }
}

TEST_CASE("fit on unequal 2x2 margins matches a bisection reference") {
  // Equal column targets make both column multipliers equal; the row multipliers
  // then solve sigma(a) = 0.75 and sigma(b) = 0.25 for the two rows.
  auto bisect = [](double target) {
    double lo = -20, hi = 20;
    for (int k = 0; k < 200; ++k) {
      const double mid = 0.5 * (lo + hi);
      (1 / (1 + std::exp(-mid)) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  const double a = bisect(0.75), b = bisect(0.25);
  // The default tolerance bounds the gradient near 1e-6; a tighter one pins
  // the parameters down to rounding.
  for (double tol : {1e-12, 1e-24}) {
    SolverConfig c;
    c.tol = tol;
    const double eps = tol > 1e-20 ? 1e-5 : 1e-10;
    const auto r = fit({{1.5, 0.5}, {1.0, 1.0}, false}, Domain::Binary, Structure::database(2, 2), c);
    CHECK(r.trace.status == FitStatus::Converged);
    for (Index j = 0; j < 2; ++j) {
      CHECK(r.model.theta(0, j) == doctest::Approx(a).epsilon(eps));
      CHECK(r.model.theta(1, j) == doctest::Approx(b).epsilon(eps));
      CHECK(r.model.cell(0, j).mean() == doctest::Approx(0.75).epsilon(eps));
      CHECK(r.model.cell(1, j).mean() == doctest::Approx(0.25).epsilon(eps));
    }
  }
}

TEST_CASE("fits satisfy margins in every domain and structure") {
  std::mt19937_64 gen(17);
  for (Domain d : {Domain::Binary, Domain::NonNegInteger, Domain::NonNegReal}) {
    for (int trial = 0; trial < 4; ++trial) {
      const std::size_t m = 3 + gen() % 20, n = 3 + gen() % 20;
      DataMatrix data(Structure::database(m, n), d);
      std::uniform_real_distribution<double> u(0, 1);
      for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
          const double v = d == Domain::Binary ? (u(gen) < 0.3) : d == Domain::NonNegInteger ? std::floor(4 * u(gen)) : 3 * u(gen);
          data.set(i, j, v);
        }
      const auto t = compute_margins(data);
      for (SolverMethod method : {SolverMethod::Newton, SolverMethod::PrecondGradDescent}) {
        SolverConfig c;
        c.method = method;
        c.max_iter = 5000;
        const auto r = fit(t, d, data.structure(), c);
        CHECK(r.trace.status == FitStatus::Converged);
        check_margins(r, t);
      }
    }
  }
}

TEST_CASE("network fits satisfy degree targets") {
  for (bool loops : {false, true}) {
    for (Domain d : {Domain::Binary, Domain::NonNegInteger}) {
      const auto t = generate_degrees({.n = 300, .exponent = 2.5, .seed = 9});
      const auto r = fit(t, d, Structure::undirected(300, loops));
      CHECK(r.trace.status == FitStatus::Converged);
      check_margins(r, t);
    }
    const MarginTargets directed{{1, 2, 0, 3, 2, 2}, {2, 2, 2, 1, 1, 2}, false};
    const auto r = fit(directed, Domain::Binary, Structure::directed(6, loops));
    CHECK(r.trace.status == FitStatus::Converged);
    check_margins(r, directed);
  }
}

TEST_CASE("boundary targets give infinite multipliers") {
  const MarginTargets t{{0, 2, 1}, {1, 2}, false};
  const auto r = fit(t, Domain::Binary, Structure::database(3, 2));
  CHECK(r.trace.status == FitStatus::Converged);
  CHECK(r.model.row_lambda(0) == -kInf);
  CHECK(r.model.cell(0, 1).mean() == 0.0);
  CHECK(r.model.cell(1, 0).mean() == 1.0);
  check_margins(r, t, 1e-9);
}

TEST_CASE("infeasible targets throw") {
  auto kind = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  CHECK(kind([] { fit({{1, 1}, {1, 2}, false}, Domain::Binary, Structure::database(2, 2)); }) == ErrorKind::Infeasible);
  // A node with degree 3 among three nodes without self-loops.
  CHECK(kind([] { fit({{3, 1, 1}, {}, true}, Domain::Binary, Structure::undirected(3, false)); }) ==
        ErrorKind::Infeasible);
  // Row 0 must fill both columns, but column 1 may hold nothing.
  CHECK(kind([] { fit({{2, 0}, {2, 0}, false}, Domain::Binary, Structure::database(2, 2)); }) == ErrorKind::Infeasible);
}

TEST_CASE("iteration limit returns the best iterate") {
  SolverConfig c;
  c.max_iter = 1;
  c.method = SolverMethod::PrecondGradDescent;
  const auto t = generate_degrees({.n = 200, .exponent = 2.5, .seed = 1});
  const auto r = fit(t, Domain::Binary, Structure::undirected(200, false), c);
  CHECK(r.trace.status == FitStatus::MaxIterReached);
  CHECK(r.model.fit_info().iterations == 1);
  CHECK(r.trace.records.size() == 2);
}

TEST_CASE("trace dual values decrease") {
  const auto t = generate_degrees({.n = 2000, .exponent = 2.5, .seed = 2});
  for (SolverMethod method : {SolverMethod::Newton, SolverMethod::PrecondGradDescent}) {
    SolverConfig c;
    c.method = method;
    const auto r = fit(t, Domain::NonNegInteger, Structure::undirected(2000, true), c);
    REQUIRE(r.trace.records.size() >= 2);
    for (std::size_t k = 1; k < r.trace.records.size(); ++k)
      CHECK(r.trace.records[k].dual <= r.trace.records[k - 1].dual + 1e-12 * std::abs(r.trace.records[k - 1].dual));
    CHECK(r.trace.records.back().grad_sq_norm < 1e-12);
  }
}

TEST_CASE("binning reduces the group count") {
  const auto t = generate_degrees({.n = 5000, .exponent = 2.0, .seed = 4});
  SolverConfig c;
  c.max_bins = 10;
  const auto r = fit(t, Domain::Binary, Structure::undirected(5000, false), c);
  CHECK(r.model.row_groups().size() <= 10);
  const auto e = expected_margins(r.model);
  CHECK(std::accumulate(e.rows.begin(), e.rows.end(), 0.0) == doctest::Approx(t.total()).epsilon(1e-6));
}

TEST_CASE("joint classes for directed networks without self-loops") {
  const MarginTargets t{{1, 1, 2}, {2, 1, 1}, false};
  const auto g = refine_for_structure(group_targets(t), Structure::directed(3, false));
  CHECK(g.row_groups.size() == 3);
  CHECK(g.col_groups.size() == 3);
  CHECK(refine_for_structure(group_targets(t), Structure::directed(3, true)) == group_targets(t));
}
