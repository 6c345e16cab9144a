#include <doctest.h>

#include <random>

#include "maxent/assessment.hpp"
#include "maxent/error.hpp"
#include "oracles.hpp"

using namespace maxent;

namespace {

DataMatrix dense(std::vector<std::vector<double>> rows) {
  DataMatrix m(Structure::database(rows.size(), rows.at(0).size()), Domain::Binary);
  for (Index i = 0; i < rows.size(); ++i)
    for (Index j = 0; j < rows[i].size(); ++j) m.set(i, j, rows[i][j]);
  return m;
}

}  // namespace

TEST_CASE("closed itemsets of tiny matrices") {
  auto r = mine_closed(dense({{1, 1}, {1, 1}}), 1);
  REQUIRE(r.itemsets.size() == 1);
  CHECK(r.itemsets[0].items == std::vector<Index>{0, 1});
  CHECK(r.itemsets[0].support == 2);

  r = mine_closed(dense({{1, 0}, {0, 1}}), 1);
  REQUIRE(r.itemsets.size() == 2);
  CHECK(r.itemsets[0] == ClosedItemset{{0}, 1});
  CHECK(r.itemsets[1] == ClosedItemset{{1}, 1});
  CHECK(r.counts_by_size == SizeCounts{{1, 2}});
}

TEST_CASE("empty and all-zero databases have no closed itemsets") {
  CHECK(mine_closed(DataMatrix(Structure::database(4, 3), Domain::Binary), 1).itemsets.empty());
  CHECK(count_closed(DataMatrix(Structure::database(0, 0), Domain::Binary), 1).empty());
}

TEST_CASE("mining rejects non-binary or network input") {
  CHECK_THROWS_AS(mine_closed(DataMatrix(Structure::database(2, 2), Domain::NonNegInteger), 1), Error);
  CHECK_THROWS_AS(mine_closed(DataMatrix(Structure::undirected(3, false), Domain::Binary), 1), Error);
  CHECK_THROWS_AS(mine_closed(dense({{1}}), 0), Error);
}

TEST_CASE("mining agrees with exhaustive enumeration") {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + gen() % 12, n = 1 + gen() % 8;
    const double density = (gen() % 100) / 100.0;
    DataMatrix d(Structure::database(m, n), Domain::Binary);
    std::bernoulli_distribution b(density);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j)
        if (b(gen)) d.set(i, j, 1);
    const std::size_t min_support = 1 + gen() % 3;
    const auto got = mine_closed(d, min_support);
    const auto want = oracle::closed_itemsets(d, min_support);
    CHECK(got.itemsets == want);
    CHECK(count_closed(d, min_support) == got.counts_by_size);
  }
}
