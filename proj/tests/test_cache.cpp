#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "test_common.hpp"
#include "vecsim/cache.hpp"
#include "vecsim/errors.hpp"

using namespace vecsim;

namespace {

CacheBudgets budgets(int per_class_units, int classes = 1, int per_class = 5) {
  return {per_class_units, per_class_units * classes, classes, per_class};
}

// History for one class built from per-content counts; the request order
// gives each content a last-used slot.
RequestHistory history_from(const std::vector<int>& counts, const std::vector<int>& order = {}) {
  RequestHistory h(1, 1, static_cast<int>(counts.size()));
  int slot = 0;
  for (std::size_t f = 0; f < counts.size(); ++f) {
    for (int i = 0; i < counts[f]; ++i) {
      Request r;
      r.content = {0, static_cast<int>(f)};
      h.record(r, false, slot++);
    }
  }
  for (int f : order) {
    Request r;
    r.content = {0, f};
    h.record(r, false, slot++);
  }
  return h;
}

std::vector<int> stored(const CacheState& s, int cls = 0) { return s.stored_in_class(cls); }

} // namespace

TEST_CASE("budget validation") {
  CHECK_NOTHROW(budgets(2, 3).validate());
  CHECK_THROWS_AS((CacheBudgets{2, 5, 3, 5}.validate()), ConfigError);
  CHECK_THROWS_AS((CacheBudgets{6, 6, 1, 5}.validate()), ConfigError);
  SimConfig c;
  c.cache_size_units = 9;
  const auto b = budgets_from(c);
  CHECK(b.per_class_units == 3);
  CHECK(b.total_units == 9);
}

TEST_CASE("rcr: saturation, determinism and uniformity") {
  Rng rng(1);
  CHECK(stored(place_rcr(budgets(5), rng)) == std::vector<int>{0, 1, 2, 3, 4});
  Rng a(9), b(9);
  CHECK(place_rcr(budgets(2, 3), a) == place_rcr(budgets(2, 3), b));

  std::vector<int> freq(5, 0);
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    Rng r(static_cast<std::uint64_t>(s));
    const auto st = place_rcr(budgets(1), r);
    REQUIRE(st.satisfies_budgets());
    ++freq[stored(st)[0]];
  }
  const double sigma = std::sqrt(0.2 * 0.8 / n);
  for (int f : freq) CHECK(std::abs(f / double(n) - 0.2) <= 3 * sigma);
}

TEST_CASE("kpop") {
  CHECK(stored(place_kpop(history_from({5, 3, 1, 0, 0}), budgets(2))) == std::vector<int>{0, 1});
  CHECK(stored(place_kpop(history_from({0, 0, 0, 0, 0}), budgets(2))) == std::vector<int>{0, 1});
  CHECK(stored(place_kpop(history_from({1, 1, 1, 1, 1}), budgets(3))) ==
        std::vector<int>{0, 1, 2});
  CHECK(stored(place_kpop(history_from({0, 2, 0, 4, 1}), budgets(2))) == std::vector<int>{1, 3});
}

TEST_CASE("klru") {
  // Content 4 is the most recent request outside the K-PoP set.
  CHECK(stored(place_klru(history_from({5, 3, 0, 0, 0}, {4}), budgets(2))) ==
        std::vector<int>{0, 4});
  CHECK(stored(place_klru(history_from({5, 3, 0, 0, 0}), budgets(2))) == std::vector<int>{0, 1});
  CHECK(stored(place_klru(history_from({5, 3, 0, 0, 0}, {0}), budgets(2))) ==
        std::vector<int>{0, 1});
  // Two swaps take the two most recent outsiders.
  CHECK(stored(place_klru(history_from({5, 3, 0, 0, 0}, {2, 4}), budgets(2), 2)) ==
        std::vector<int>{2, 4});
}

TEST_CASE("genie") {
  CHECK(stored(place_genie({0, 7, 2, 2, 0}, budgets(2))) == std::vector<int>{1, 2});
  CHECK(stored(place_genie({0, 0, 0, 0, 0}, budgets(2))) == std::vector<int>{0, 1});
  CHECK(stored(place_genie({3, 1, 4, 1, 5}, budgets(5))) == std::vector<int>{0, 1, 2, 3, 4});
  CHECK_THROWS_AS(place_genie({1, 2}, budgets(1)), ContractViolation);
}

TEST_CASE("chr") {
  CHECK(*chr(2, 3) == doctest::Approx(2.0 / 3.0));
  CHECK(*chr(0, 4) == 0.0);
  CHECK_FALSE(chr(0, 0).has_value());
}

TEST_CASE("property: every policy meets the budgets and genie dominates per DoI") {
  Rng gen(77);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(gen() % 5);
    const auto b = budgets(k, 3);
    std::vector<int> upcoming(15);
    RequestHistory past(2, 3, 5);
    for (int i = 0; i < 40; ++i) {
      Request r;
      r.cv_id = static_cast<int>(gen() % 2);
      r.content = {static_cast<int>(gen() % 3), static_cast<int>(gen() % 5)};
      past.record(r, false, i);
    }
    long total = 0;
    for (int& u : upcoming) total += (u = static_cast<int>(gen() % 6));
    Rng prng(static_cast<std::uint64_t>(trial));
    const std::vector<CacheState> states{place_rcr(b, prng), place_kpop(past, b),
                                         place_klru(past, b), place_genie(upcoming, b)};
    std::vector<long> hits;
    for (const auto& s : states) {
      CHECK(s.satisfies_budgets());
      long h = 0;
      for (int j = 0; j < 15; ++j) h += s.stored({j / 5, j % 5}) ? upcoming[j] : 0;
      hits.push_back(h);
    }
    for (long h : hits) CHECK(hits.back() >= h);
    CHECK(hits.back() <= total);
  }
}

TEST_CASE("request history bookkeeping") {
  RequestHistory h(2, 1, 3);
  Request r;
  r.cv_id = 1;
  r.content = {0, 2};
  h.record(r, true, 4);
  h.record(r, false, 7);
  CHECK(h.requests(1, {0, 2}) == 2);
  CHECK(h.hits(1, {0, 2}) == 1);
  CHECK(h.aggregate({0, 2}) == 2);
  CHECK(h.last_used({0, 2}) == 7);
  CHECK(h.last_used({0, 0}) == -1);
  h.clear();
  CHECK(h.aggregate({0, 2}) == 0);
  CHECK(h.last_used({0, 2}) == -1);
}

TEST_CASE("placement CSV") {
  const auto dir = scratch_dir("placements");
  CacheState s(budgets(1, 1, 2), 3);
  s.set({0, 1}, true);
  const auto path = (dir / "p.csv").string();
  write_placements(path, {{3, s}}, "fp");
  CHECK(read_file(path) == "# config_fingerprint=fp\nepoch,class,content,stored\n3,0,0,0\n3,0,1,1\n");
}
