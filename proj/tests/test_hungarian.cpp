#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "vecsim/hungarian.hpp"
#include "vecsim/rng.hpp"

using namespace vecsim;

namespace {

double brute_force(const WeightMatrix& w) {
  std::vector<int> perm(w.cols);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double s = 0.0;
    for (int r = 0; r < w.rows; ++r) s += w(r, perm[r]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

} // namespace

TEST_CASE("hand examples") {
  const auto m1 = hungarian(WeightMatrix{{5}});
  CHECK(m1.col_of_row == std::vector<int>{0});
  CHECK(m1.weight == 5.0);
  const auto m2 = hungarian(WeightMatrix{{1, 2}, {3, 5}});
  CHECK(m2.pairs() == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  CHECK(m2.weight == 6.0);
  CHECK(hungarian(WeightMatrix{}).weight == 0.0);
}

TEST_CASE("rectangular matrices leave rows or columns unmatched") {
  const auto tall = hungarian(WeightMatrix{{1, 0}, {0, 1}, {5, 5}});
  CHECK(tall.weight == 6.0);
  CHECK(std::count(tall.col_of_row.begin(), tall.col_of_row.end(), -1) == 1);
  const auto wide = hungarian(WeightMatrix{{1, 4, 2}});
  CHECK(wide.col_of_row == std::vector<int>{1});
}

TEST_CASE("ties resolve to the lexicographically smallest assignment") {
  const auto m = hungarian(WeightMatrix{{1, 1}, {1, 1}});
  CHECK(m.col_of_row == std::vector<int>{0, 1});
  const auto z = hungarian(WeightMatrix(3, 3, 0.0));
  CHECK(z.col_of_row == std::vector<int>{0, 1, 2});
}

TEST_CASE("random 6x6 against all permutations") {
  Rng rng(42);
  HungarianSolver solver;
  std::vector<int> cols;
  for (int trial = 0; trial < 200; ++trial) {
    WeightMatrix w(6, 6);
    for (double& x : w.data) x = uniform01(rng) * 10.0;
    const double expect = brute_force(w);
    const auto m = hungarian(w);
    CHECK(m.weight == doctest::Approx(expect).epsilon(1e-12));
    CHECK(matching_weight(w, m.col_of_row) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(solver.solve(w, cols) == doctest::Approx(expect).epsilon(1e-12));
  }
}
