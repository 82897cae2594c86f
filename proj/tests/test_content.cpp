#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "vecsim/content.hpp"
#include "vecsim/errors.hpp"

using namespace vecsim;

TEST_CASE("library shape, normalisation and determinism") {
  const SimConfig c;
  Rng a(7), b(7);
  const auto lib = build_library(c, a);
  const auto lib2 = build_library(c, b);
  CHECK(lib.classes() == 3);
  CHECK(lib.per_class() == 5);
  CHECK(lib.features() == 10);
  for (int cls = 0; cls < 3; ++cls) {
    const auto& p = lib.popularity(cls);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int f = 0; f < 5; ++f) {
      const auto v = lib.feature({cls, f});
      const auto w = lib2.feature({cls, f});
      CHECK(std::equal(v.begin(), v.end(), w.begin()));
      for (double x : v) CHECK(x > 0.0);
    }
  }
  CHECK(nlohmann::json(lib) == nlohmann::json(lib2));
}

TEST_CASE("single-content library has popularity [1]") {
  SimConfig c;
  c.num_classes = 1;
  c.contents_per_class = 1;
  c.cache_size_units = 0;
  Rng rng(1);
  const auto lib = build_library(c, rng);
  CHECK(lib.popularity(0) == std::vector<double>{1.0});
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 2, 3}, x{1, 0}, y{0, 1}, p{1, 0, 1}, q{1, 1, 0}, z{0, 0, 0};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(x, y) == 0.0);
  CHECK(cosine_similarity(p, q) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(cosine_similarity(a, z), DomainError);
  CHECK_THROWS_AS(cosine_similarity(a, x), DomainError);
}

TEST_CASE("zero request probability never emits") {
  const SimConfig c;
  Rng rng(3);
  const auto lib = build_library(c, rng);
  CvPreferenceState cv{0.0, 0.5, {0.2, 0.3, 0.5}, std::nullopt};
  for (int t = 0; t < 1000; ++t) CHECK_FALSE(generate_request(cv, 0, lib, rng, t, {}).has_value());
}

TEST_CASE("exploitation returns the most similar other content") {
  const SimConfig c;
  Rng rng(4);
  const auto lib = build_library(c, rng);
  // Independent argmax over the feature matrix.
  double best = -1.0;
  int expected = -1;
  for (int g = 0; g < 5; ++g) {
    if (g == 2) continue;
    const double s = cosine_similarity(lib.feature({0, 2}), lib.feature({0, g}));
    if (s > best) {
      best = s;
      expected = g;
    }
  }
  CvPreferenceState cv{1.0, 1.0, {1.0 / 3, 1.0 / 3, 1.0 / 3}, ContentId{0, 2}};
  const auto r = generate_request(cv, 0, lib, rng, 12, {});
  REQUIRE(r.has_value());
  CHECK(r->content == ContentId{0, expected});
  CHECK(r->server_deadline == 10);
  CHECK(r->remaining_payload == c.content_size_bits);
}

TEST_CASE("exploration matches the renormalised class and content laws") {
  const SimConfig c;
  Rng rng(5);
  const auto lib = build_library(c, rng);
  const std::vector<double> prefs{0.2, 0.3, 0.5};
  const int n = 100000;
  std::vector<int> cls(3, 0);
  std::vector<int> within(5, 0);
  for (int i = 0; i < n; ++i) {
    CvPreferenceState cv{1.0, 0.0, prefs, ContentId{0, 0}};
    const auto r = generate_request(cv, 0, lib, rng, 0, {});
    REQUIRE(r.has_value());
    ++cls[r->content.cls];
    if (r->content.cls == 2) ++within[r->content.index];
  }
  CHECK(cls[0] == 0); // the current class is excluded
  const double p1 = 0.3 / 0.8;
  const double sigma = std::sqrt(p1 * (1 - p1) / n);
  CHECK(std::abs(cls[1] / double(n) - p1) <= 3 * sigma);
  for (int f = 0; f < 5; ++f) {
    const double p = lib.popularity(2)[f];
    const double s = std::sqrt(p * (1 - p) / cls[2]);
    CHECK(std::abs(within[f] / double(cls[2]) - p) <= 3 * s);
  }
}

TEST_CASE("first request explores") {
  const SimConfig c;
  Rng rng(6);
  const auto lib = build_library(c, rng);
  CvPreferenceState cv{1.0, 1.0, {0.0, 1.0, 0.0}, std::nullopt};
  const auto r = generate_request(cv, 3, lib, rng, 0, {});
  REQUIRE(r.has_value());
  CHECK(r->content.cls == 1);
  CHECK(cv.last_request.has_value());
}

TEST_CASE("streams: one request per CV per slot, deterministic, policy-independent") {
  SimConfig c;
  c.episode_slots = 300;
  const Environment env = build_environment(c);
  const auto s1 = episode_stream(c, env, 8);
  SimConfig other = c;
  other.policy = Policy::Rcr;
  other.rat = Rat::NcRat;
  const auto s2 = episode_stream(other, env, 8);
  REQUIRE(s1.size() == 300);
  for (int t = 0; t < 300; ++t) {
    REQUIRE(s1[t].size() == s2[t].size());
    std::vector<int> seen(c.num_cvs, 0);
    for (std::size_t i = 0; i < s1[t].size(); ++i) {
      CHECK(s1[t][i].content == s2[t][i].content);
      CHECK(s1[t][i].arrival_slot == t);
      CHECK(++seen[s1[t][i].cv_id] == 1);
      CHECK(s1[t][i].server_deadline == std::min(10, (t / 50 + 1) * 50 - t));
    }
  }
  const auto s3 = episode_stream(c, env, 9);
  bool differs = false;
  for (int t = 0; t < 300 && !differs; ++t) differs = s1[t].size() != s3[t].size();
  CHECK(differs);
}

TEST_CASE("Chernoff bound") {
  const std::vector<double> half(10, 0.5);
  const double d = 0.8 * std::log(0.8 / 0.5) + 0.2 * std::log(0.2 / 0.5);
  CHECK(chernoff_bound(half, 8) == doctest::Approx(std::exp(-10 * d)).epsilon(1e-14));
  CHECK(chernoff_bound(half, 8) == doctest::Approx(0.1457).epsilon(1e-3));
  CHECK(std::abs(binomial_tail(10, 0.5, 8) - 56.0 / 1024.0) < 1e-12);
  CHECK(binomial_tail(10, 0.5, 8) <= chernoff_bound(half, 8));
  CHECK_THROWS_AS(chernoff_bound(half, 5), DomainError);  // xi at the mean
  CHECK_THROWS_AS(chernoff_bound(half, 10), DomainError); // xi = U
  const std::vector<double> bad{0.0, 0.5};
  CHECK_THROWS_AS(chernoff_bound(bad, 1.5), DomainError);
}

TEST_CASE("population draws stay in range") {
  const SimConfig c;
  Rng rng(2);
  const auto pop = build_population(c, 3, rng);
  REQUIRE(pop.size() == 10);
  for (const auto& cv : pop) {
    CHECK(cv.p_request > c.p_request_min);
    CHECK(cv.p_request <= c.p_request_max);
    CHECK(cv.epsilon >= c.epsilon_min_cv);
    CHECK(cv.epsilon <= c.epsilon_max_cv);
    CHECK(std::accumulate(cv.class_prefs.begin(), cv.class_prefs.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}
