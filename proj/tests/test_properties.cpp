#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecsim/content.hpp"
#include "vecsim/delivery.hpp"
#include "vecsim/experiment.hpp"
#include "vecsim/scheduler.hpp"

using namespace vecsim;

TEST_CASE("similarity ranking ignores positive scaling of features") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    const int F = 6, G = 4;
    std::vector<double> feats(F * G), scaled(F * G);
    for (int f = 0; f < F; ++f) {
      const double k = 0.1 + 10.0 * uniform01(rng);
      for (int g = 0; g < G; ++g) {
        feats[f * G + g] = 0.01 + uniform01(rng);
        scaled[f * G + g] = k * feats[f * G + g];
      }
    }
    const std::vector<std::vector<double>> pop{std::vector<double>(F, 1.0 / F)};
    const ContentLibrary a(1, F, G, 1000.0, feats, pop);
    const ContentLibrary b(1, F, G, 1000.0, scaled, pop);
    for (int f = 0; f < F; ++f) CHECK(a.most_similar({0, f}) == b.most_similar({0, f}));
  }
}

TEST_CASE("priorities sum to one and fall with the deadline") {
  Rng rng(32);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    std::vector<int> d(n);
    for (int& x : d) x = 1 + static_cast<int>(rng() % 10);
    const auto phi = priorities(d);
    CHECK(std::accumulate(phi.begin(), phi.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i] < d[j]) CHECK(phi[i] > phi[j]);
  }
}

TEST_CASE("Chernoff bound lies in (0, 1]") {
  Rng rng(33);
  for (int trial = 0; trial < 500; ++trial) {
    const int U = 2 + static_cast<int>(rng() % 20);
    std::vector<double> p(U);
    for (double& x : p) x = 0.05 + 0.9 * uniform01(rng);
    const double mu = std::accumulate(p.begin(), p.end(), 0.0);
    const double xi = mu + (U - mu) * (0.01 + 0.98 * uniform01(rng));
    const double b = chernoff_bound(p, xi);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
  }
}

TEST_CASE("the scheduled set is the top-W eligible CVs by priority") {
  Rng rng(34);
  for (int trial = 0; trial < 300; ++trial) {
    EligibilityResult e;
    const int n = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) {
      e.valid_cvs.push_back(i * 2);
      e.min_deadlines.push_back(1 + static_cast<int>(rng() % 10));
      e.payloads.push_back(100.0 * static_cast<double>(1 + rng() % 5));
    }
    const int w = vc_count(n, 5);
    const auto top = top_priority(e, w);
    REQUIRE(static_cast<int>(top.size()) == w);
    const auto phi = priorities(e.min_deadlines);
    double weakest = 2.0;
    for (int i : top) weakest = std::min(weakest, phi[i]);
    for (int i = 0; i < n; ++i) {
      if (std::find(top.begin(), top.end(), i) == top.end()) CHECK(phi[i] <= weakest);
    }
  }
}

TEST_CASE("one request per CV per slot") {
  SimConfig c;
  c.episode_slots = 500;
  const auto env = build_environment(c);
  const auto stream = episode_stream(c, env, 35);
  for (const auto& slot : stream) {
    std::vector<int> n(c.num_cvs, 0);
    for (const auto& r : slot) CHECK(++n[r.cv_id] == 1);
  }
}

TEST_CASE("completed requests had enough scheduled capacity") {
  SimConfig c;
  c.episode_slots = 200;
  c.rat = Rat::UserCentric;
  c.policy = Policy::KPop;
  const auto env = build_environment(c);
  const auto r = run_episode(c, env, 36);
  for (const auto& o : r.outcomes) {
    if (!o.violated) {
      CHECK(o.scheduled_capacity_bits >= c.content_size_bits);
      CHECK(o.request.served_slots >= 1);
      CHECK(o.request.served_slots <= o.delay);
    }
  }
}
