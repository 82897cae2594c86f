#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecsim/errors.hpp"
#include "vecsim/scheduler.hpp"

using namespace vecsim;

namespace {

Request req(int cv, int arrival, bool hit, int ready, int deadline, double payload) {
  Request q;
  q.cv_id = cv;
  q.arrival_slot = arrival;
  q.cache_hit = hit;
  q.extraction_ready_slot = ready;
  q.server_deadline = deadline;
  q.remaining_deadline = deadline;
  q.remaining_payload = payload;
  return q;
}

ChannelTable random_table(Rng& rng, int aps, int cvs, int prbs) {
  ChannelTable t(aps, cvs, prbs);
  const LinkBudget budget;
  // Gains spread around an SNR of 0..60 dB.
  for (int b = 0; b < aps; ++b)
    for (int u = 0; u < cvs; ++u)
      for (int z = 0; z < prbs; ++z)
        t.gain(b, u, z) = db_to_linear(60.0 * uniform01(rng)) * budget.noise_power_mw() /
                          budget.tx_scale_mw();
  return t;
}

// Exhaustive search over configurations and every pRB permutation, with rates
// recomputed from the channel table.
double brute_force_wsr(int W, const std::vector<int>& cvs, const std::vector<double>& phi,
                       const ChannelTable& t) {
  const LinkBudget budget;
  const double scale = budget.tx_scale_mw() / budget.noise_power_mw();
  std::vector<int> prb(t.aps());
  double best = 0.0;
  for (const auto& c : enumerate_partitions(t.aps(), W)) {
    std::iota(prb.begin(), prb.end(), 0);
    do {
      double s = 0.0;
      for (int b = 0; b < t.aps(); ++b) {
        const int i = c.block_of_ap[b];
        s += phi[i] * std::log2(1.0 + scale * t.gain(b, cvs[i], prb[b]));
      }
      best = std::max(best, s);
    } while (std::next_permutation(prb.begin(), prb.end()));
  }
  return best;
}

} // namespace

TEST_CASE("slots of interest") {
  std::vector<int> expect(10);
  std::iota(expect.begin(), expect.end(), 91);
  CHECK(soi(100, 10) == expect);
  CHECK(soi(0, 10) == std::vector<int>{0});
  CHECK(soi(5, 3) == std::vector<int>{3, 4, 5});
}

TEST_CASE("eligibility") {
  CHECK(eligible_cvs(soi(20, 10), {}, 20).valid_cvs.empty());
  const std::vector<Request> miss{req(3, 10, false, 15, 10, 500.0)};
  for (int t = 10; t <= 16; ++t) {
    CHECK(eligible_cvs(soi(t, 10), miss, t).valid_cvs.empty() == (t < 15));
  }
  const std::vector<Request> two{req(1, 30, true, 30, 7, 100.0), req(1, 31, true, 31, 4, 250.0)};
  const auto e = eligible_cvs(soi(32, 10), two, 32);
  CHECK(e.valid_cvs == std::vector<int>{1});
  CHECK(e.min_deadlines == std::vector<int>{4});
  CHECK(e.payloads == std::vector<double>{250.0});
}

TEST_CASE("VC count and priorities") {
  CHECK(vc_count(8, 5) == 5);
  CHECK(vc_count(3, 5) == 3);
  CHECK(vc_count(0, 5) == 0);
  const std::vector<int> d{1, 2, 4}, eq{3, 3}, one{6}, bad{1, 0};
  const auto p = priorities(d);
  CHECK(p[0] == doctest::Approx(4.0 / 7.0).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(2.0 / 7.0).epsilon(1e-15));
  CHECK(p[2] == doctest::Approx(1.0 / 7.0).epsilon(1e-15));
  CHECK(priorities(eq) == std::vector<double>{0.5, 0.5});
  CHECK(priorities(one) == std::vector<double>{1.0});
  CHECK_THROWS_AS(priorities(bad), ContractViolation);
}

TEST_CASE("top priority ordering") {
  EligibilityResult e;
  e.valid_cvs = {0, 2, 5, 7};
  e.min_deadlines = {5, 3, 3, 1};
  e.payloads = {10.0, 10.0, 20.0, 5.0};
  CHECK(top_priority(e, 3) == std::vector<int>{3, 2, 1});
}

TEST_CASE("weighted rate matrix") {
  const LinkBudget budget;
  ChannelTable zero(2, 2, 2);
  const std::vector<int> cvs{0, 1};
  const std::vector<double> phi{0.75, 0.25};
  const auto configs = enumerate_partitions(2, 2);
  const auto m0 = weighted_rate_matrix(cvs, configs[0], phi, zero, budget);
  for (double x : m0.data) CHECK(x == 0.0);

  // SNR of 3 everywhere.
  ChannelTable t(2, 2, 2);
  for (int b = 0; b < 2; ++b)
    for (int u = 0; u < 2; ++u)
      for (int z = 0; z < 2; ++z) t.gain(b, u, z) = 3.0 * budget.noise_power_mw() / budget.tx_scale_mw();
  const auto single = enumerate_partitions(1, 1);
  ChannelTable t1(1, 1, 3);
  for (int z = 0; z < 3; ++z) t1.gain(0, 0, z) = t.gain(0, 0, 0);
  const std::vector<int> cv0{0};
  const std::vector<double> one{1.0};
  const auto m1 = weighted_rate_matrix(cv0, single[0], one, t1, budget);
  for (double x : m1.data) CHECK(x == doctest::Approx(2.0).epsilon(1e-12));

  const auto m2 = weighted_rate_matrix(cvs, configs[0], phi, t, budget);
  const int b1 = configs[0].blocks[0][0], b2 = configs[0].blocks[1][0];
  for (int z = 0; z < 2; ++z) CHECK(m2(b2, z) == doctest::Approx(m2(b1, z) / 3.0).epsilon(1e-14));
}

TEST_CASE("search equals the double-exhaustive oracle") {
  Rng rng(99);
  PartitionCache cache;
  const LinkBudget budget;
  for (int trial = 0; trial < 30; ++trial) {
    const int B = 2 + trial % 3;
    const int W = 1 + trial % B;
    const auto t = random_table(rng, B, 4, B);
    std::vector<int> cvs(W);
    std::iota(cvs.begin(), cvs.end(), 0);
    std::vector<int> deadlines(W);
    for (int& d : deadlines) d = 1 + static_cast<int>(rng() % 10);
    const auto phi = priorities(deadlines);
    const auto dec = optimal_vc_and_prb(W, cvs, phi, t, budget, cache);
    CHECK(dec.wsr == doctest::Approx(brute_force_wsr(W, cvs, phi, t)).epsilon(1e-12));
  }
}

TEST_CASE("OpenMP and serial searches agree exactly at B=6") {
  Rng rng(5);
  PartitionCache cache;
  const LinkBudget budget;
  for (int W = 3; W <= 5; ++W) {
    const auto t = random_table(rng, 6, 5, 6);
    std::vector<int> cvs{4, 1, 3, 0, 2};
    cvs.resize(W);
    std::vector<int> d{1, 2, 3, 5, 8};
    d.resize(W);
    const auto phi = priorities(d);
    const auto a = optimal_vc_and_prb(W, cvs, phi, t, budget, cache);
    const auto b = optimal_vc_and_prb_serial(W, cvs, phi, t, budget, cache);
    CHECK(a.wsr == b.wsr);
    CHECK(a.config_index == b.config_index);
    CHECK(a.prb_of_ap == b.prb_of_ap);
  }
}

TEST_CASE("all-equal channels return the first configuration") {
  PartitionCache cache;
  const LinkBudget budget;
  ChannelTable t(4, 2, 4);
  for (int b = 0; b < 4; ++b)
    for (int u = 0; u < 2; ++u)
      for (int z = 0; z < 4; ++z) t.gain(b, u, z) = 1e-12;
  const std::vector<int> cvs{0, 1};
  const std::vector<double> phi{0.5, 0.5};
  const auto dec = optimal_vc_and_prb(2, cvs, phi, t, budget, cache);
  CHECK(dec.config_index == 0);
  CHECK(dec.config == enumerate_partitions(4, 2)[0]);
  int granted = 0;
  for (int i = 0; i < 2; ++i) granted += static_cast<int>(dec.grants_for_block(i).size());
  CHECK(granted == 4);
}
