#include <doctest.h>

#include <cmath>
#include <numeric>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "maxent/matrix.hpp"

using namespace maxent;

namespace {

DataMatrix dense(Domain d, std::vector<std::vector<double>> rows) {
  DataMatrix m(Structure::database(rows.size(), rows.at(0).size()), d);
  for (Index i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Usage;
}

}  // namespace

TEST_CASE("domain membership") {
  CHECK(in_domain(0, Domain::Binary));
  CHECK(in_domain(1, Domain::Binary));
  CHECK_FALSE(in_domain(2, Domain::Binary));
  CHECK(in_domain(7, Domain::NonNegInteger));
  CHECK_FALSE(in_domain(0.5, Domain::NonNegInteger));
  CHECK_FALSE(in_domain(-1, Domain::NonNegInteger));
  CHECK(in_domain(0.5, Domain::NonNegReal));
  CHECK_FALSE(in_domain(-0.1, Domain::NonNegReal));
}

TEST_CASE("data matrix rejects values outside domain and structure") {
  DataMatrix b(Structure::database(2, 2), Domain::Binary);
  CHECK(kind_of([&] { b.set(0, 0, 2); }) == ErrorKind::Input);
  CHECK(kind_of([&] { b.set(2, 0, 1); }) == ErrorKind::Input);

  DataMatrix net(Structure::directed(3, false), Domain::Binary);
  CHECK(kind_of([&] { net.set(1, 1, 1); }) == ErrorKind::Input);
  net.set(1, 2, 1);
  CHECK(net.get(1, 2) == 1);
  CHECK(net.get(2, 1) == 0);
}

TEST_CASE("zeros are not stored") {
  DataMatrix m(Structure::database(2, 2), Domain::NonNegInteger);
  m.set(0, 1, 3);
  m.set(0, 1, 0);
  CHECK(m.nonzeros() == 0);
}

TEST_CASE("undirected matrices mirror") {
  DataMatrix u(Structure::undirected(3, true), Domain::NonNegInteger);
  u.set(2, 0, 4);
  u.set(1, 1, 2);
  CHECK(u.get(0, 2) == 4);
  CHECK(u.get(2, 0) == 4);
  CHECK(u.nonzeros() == 2);
  const auto t = compute_margins(u);
  CHECK(t.symmetric);
  CHECK(t.rows == std::vector<double>{4, 2, 4});
}

TEST_CASE("compute_margins") {
  auto t = compute_margins(dense(Domain::Binary, {{1, 0}, {0, 1}}));
  CHECK(t.rows == std::vector<double>{1, 1});
  CHECK(t.cols == std::vector<double>{1, 1});

  DataMatrix zero(Structure::database(3, 4), Domain::Binary);
  t = compute_margins(zero);
  CHECK(t.rows == std::vector<double>(3, 0.0));
  CHECK(t.cols == std::vector<double>(4, 0.0));

  t = compute_margins(dense(Domain::NonNegInteger, {{2, 0, 1}, {0, 3, 0}}));
  CHECK(t.rows == std::vector<double>{3, 3});
  CHECK(t.cols == std::vector<double>{2, 3, 1});
}

TEST_CASE("validate_targets") {
  const auto db = Structure::database(2, 3);
  CHECK_NOTHROW(validate_targets({{3, 3}, {2, 3, 1}, false}, Domain::NonNegInteger, db));
  CHECK(kind_of([&] { validate_targets({{3, 3}, {2, 3, 2}, false}, Domain::NonNegInteger, db); }) ==
        ErrorKind::Infeasible);
  CHECK(kind_of([&] { validate_targets({{-1, 7}, {2, 3, 1}, false}, Domain::NonNegReal, db); }) ==
        ErrorKind::Infeasible);
  CHECK(kind_of([&] { validate_targets({{4, 0}, {2, 1, 1}, false}, Domain::Binary, db); }) == ErrorKind::Infeasible);
  CHECK(kind_of([&] { validate_targets({{3, 3}, {2, 4}, false}, Domain::NonNegInteger, db); }) == ErrorKind::Input);

  CHECK_NOTHROW(validate_targets({{2, 1, 1}, {}, true}, Domain::Binary, Structure::undirected(3, false)));
  CHECK(kind_of([&] { validate_targets({{3, 1, 1}, {}, true}, Domain::Binary, Structure::undirected(3, false)); }) ==
        ErrorKind::Infeasible);
  CHECK_NOTHROW(validate_targets({{3, 1, 1}, {}, true}, Domain::Binary, Structure::undirected(3, true)));
}

TEST_CASE("group_targets partitions by exact value") {
  auto g = group_targets({{5, 5, 2, 5}, {1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1}, false});
  REQUIRE(g.row_groups.size() == 2);
  CHECK(g.row_groups[0].target == 2);
  CHECK(g.row_groups[0].members == std::vector<Index>{2});
  CHECK(g.row_groups[1].target == 5);
  CHECK(g.row_groups[1].members == std::vector<Index>{0, 1, 3});
  CHECK(g.col_groups.size() == 1);

  g = group_targets({{1, 2, 3}, {}, true});
  CHECK(g.row_groups.size() == 3);
  CHECK(g.col_groups.empty());

  g = group_targets({std::vector<double>(1000, 7.0), {}, true});
  REQUIRE(g.row_groups.size() == 1);
  CHECK(g.row_groups[0].multiplicity() == 1000);
}

TEST_CASE("bin_targets") {
  GroupedTargets g = group_targets({{1, 2, 3, 4}, {}, true});
  auto b = bin_targets(g, 2);
  REQUIRE(b.row_groups.size() == 2);
  CHECK(b.row_groups[0].target == doctest::Approx(1.5));
  CHECK(b.row_groups[0].multiplicity() == 2);
  CHECK(b.row_groups[1].target == doctest::Approx(3.5));
  CHECK(b.row_groups[1].multiplicity() == 2);

  CHECK(bin_targets(g, 4) == g);
  CHECK(bin_targets(g, 10) == g);
  CHECK_THROWS_AS(bin_targets(g, 0), Error);
}

TEST_CASE("binning a large power-law sequence preserves the total degree") {
  const auto t = generate_degrees({.n = 100000, .exponent = 2.5, .seed = 3});
  const auto g = group_targets(t);
  const auto b = bin_targets(g, 1000);
  CHECK(b.row_groups.size() <= 1000);
  auto total = [](const GroupedTargets& x) {
    long double s = 0;
    for (const auto& grp : x.row_groups) s += static_cast<long double>(grp.target) * grp.multiplicity();
    return static_cast<double>(s);
  };
  CHECK(total(b) == doctest::Approx(t.total()).epsilon(1e-12));
  const auto expanded = expand_groups(b.row_groups, t.rows.size());
  CHECK(std::accumulate(expanded.begin(), expanded.end(), 0.0) == doctest::Approx(t.total()).epsilon(1e-12));
}

TEST_CASE("group count of sparse binary margins is small") {
  // Margins of a sparse binary matrix take at most ceil(sqrt(2s)) + 1 distinct values.
  DataMatrix m(Structure::database(200, 150), Domain::Binary);
  Index k = 0;
  for (Index i = 0; i < 200; ++i)
    for (Index j = 0; j < (i % 9); ++j) m.set(i, (j * 31 + i) % 150, 1), ++k;
  const auto g = group_targets(compute_margins(m));
  const double bound = std::min({200.0, 150.0, std::ceil(std::sqrt(2.0 * static_cast<double>(m.nonzeros())))}) + 1;
  CHECK(g.row_groups.size() <= bound);
  CHECK(g.col_groups.size() <= bound);
}
