#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bevflow/hungarian.hpp"
#include "bevflow/rng.hpp"
#include "helpers.hpp"

using namespace bevflow;

TEST_CASE("hungarian fixtures") {
  const Assignment diag = hungarian({{0.0, 9.0}, {9.0, 0.0}});
  CHECK(diag.cost == 0.0);
  REQUIRE(diag.pairs.size() == 2);
  CHECK(diag.pairs[0] == std::pair<int, int>{0, 0});
  CHECK(diag.pairs[1] == std::pair<int, int>{1, 1});

  const Assignment row = hungarian({{5.0, 2.0, 7.0}});
  CHECK(row.cost == 2.0);
  REQUIRE(row.pairs.size() == 1);
  CHECK(row.pairs[0] == std::pair<int, int>{0, 1});

  CHECK(hungarian({}).pairs.empty());
  CHECK_THROWS_AS(hungarian({{1.0, std::numeric_limits<double>::infinity()}}),
                  std::invalid_argument);
}

TEST_CASE("hungarian equals exhaustive search on random matrices") {
  Rng rng(2024);
  for (int iter = 0; iter < 400; ++iter) {
    const int n = 1 + static_cast<int>(rng.uniform_int(6));
    const int m = 1 + static_cast<int>(rng.uniform_int(6));
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (auto& r : cost)
      for (double& v : r) v = static_cast<double>(rng.uniform_int(1000));  // exact in doubles

    const Assignment got = hungarian(cost);
    const auto expect = test_helpers::brute_force_assignment(cost);
    CHECK(got.cost == expect.cost);
    CHECK(got.pairs.size() == expect.pairs.size());
  }
}

TEST_CASE("ties resolve to the lexicographically smallest pair list") {
  Rng rng(77);
  for (int iter = 0; iter < 200; ++iter) {
    const int n = 1 + static_cast<int>(rng.uniform_int(5));
    const int m = 1 + static_cast<int>(rng.uniform_int(5));
    // A tiny value alphabet forces plenty of equal-cost optima.
    std::vector<std::vector<double>> cost(n, std::vector<double>(m));
    for (auto& r : cost)
      for (double& v : r) v = static_cast<double>(rng.uniform_int(3));

    const Assignment got = hungarian(cost);
    const auto expect = test_helpers::brute_force_assignment(cost);
    CHECK(got.cost == expect.cost);
    CHECK(got.pairs == expect.pairs);
  }
}

TEST_CASE("hungarian is deterministic") {
  Rng rng(5);
  std::vector<std::vector<double>> cost(5, std::vector<double>(7));
  for (auto& r : cost)
    for (double& v : r) v = rng.uniform(0.0, 10.0);
  const Assignment a = hungarian(cost);
  const Assignment b = hungarian(cost);
  CHECK(a.pairs == b.pairs);
  CHECK(a.cost == b.cost);
}
