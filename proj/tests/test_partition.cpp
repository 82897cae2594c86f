#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "vecsim/errors.hpp"
#include "vecsim/partition.hpp"

using namespace vecsim;

namespace {

// Ordered partitions counted as surjections from B APs onto W labels.
long surjections(int B, int W) {
  long count = 0;
  std::vector<int> label(B, 0);
  while (true) {
    std::vector<bool> hit(W, false);
    for (int l : label) hit[l] = true;
    if (std::all_of(hit.begin(), hit.end(), [](bool h) { return h; })) ++count;
    int i = 0;
    while (i < B && ++label[i] == W) label[i++] = 0;
    if (i == B) break;
  }
  return count;
}

long factorial(int n) { return n <= 1 ? 1 : n * factorial(n - 1); }

} // namespace

TEST_CASE("Stirling numbers") {
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(6, 3) == 90);
  for (int b = 1; b <= 8; ++b) {
    CHECK(stirling2(b, 1) == 1);
    CHECK(stirling2(b, b) == 1);
  }
  CHECK(stirling2(0, 0) == 1);
  CHECK(stirling2(4, 0) == 0);
}

TEST_CASE("enumeration examples") {
  CHECK(enumerate_partitions(3, 2).size() == 6);
  const auto one = enumerate_partitions(5, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].blocks[0] == std::vector<int>{0, 1, 2, 3, 4});
  CHECK(enumerate_partitions(6, 3).size() == 540);
  CHECK_THROWS_AS(enumerate_partitions(3, 0), DomainError);
  CHECK_THROWS_AS(enumerate_partitions(3, 4), DomainError);
}

TEST_CASE("counts and structure against brute force") {
  for (int B = 1; B <= 7; ++B) {
    for (int W = 1; W <= std::min(B, 5); ++W) {
      const auto configs = enumerate_partitions(B, W);
      CHECK(static_cast<long>(configs.size()) == surjections(B, W));
      CHECK(static_cast<long>(configs.size()) ==
            factorial(W) * static_cast<long>(stirling2(B, W)));
      std::set<std::vector<int>> labels;
      for (const auto& c : configs) {
        REQUIRE(c.size() == W);
        std::vector<int> seen(B, 0);
        for (int i = 0; i < W; ++i) {
          CHECK_FALSE(c.blocks[i].empty());
          for (int b : c.blocks[i]) {
            ++seen[b];
            CHECK(c.block_of_ap[b] == i);
          }
        }
        for (int s : seen) CHECK(s == 1);
        labels.insert(c.block_of_ap);
      }
      CHECK(labels.size() == configs.size());
    }
  }
}

TEST_CASE("cache returns the same enumeration") {
  PartitionCache cache;
  const auto& a = cache.get(5, 3);
  const auto& b = cache.get(5, 3);
  CHECK(&a == &b);
  CHECK(a == enumerate_partitions(5, 3));
}
