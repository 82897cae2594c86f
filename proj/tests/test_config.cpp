#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_common.hpp"
#include "vecsim/config.hpp"
#include "vecsim/errors.hpp"

using namespace vecsim;

TEST_CASE("defaults reproduce the system table") {
  const SimConfig c;
  CHECK(c.num_aps == 6);
  CHECK(c.num_prbs == 6);
  CHECK(c.max_vcs == 5);
  CHECK(c.slot_seconds == 1e-3);
  CHECK(c.doi_slots == 50);
  CHECK(c.carrier_ghz == 2.0);
  CHECK(c.prb_hz == 180e3);
  CHECK(c.noise_psd_dbm_hz == -174.0);
  CHECK(c.ap_coverage_m == 250.0);
  CHECK(c.antennas == 4);
  CHECK(c.ap_height_m == 25.0);
  CHECK(c.cv_height_m == 1.5);
  CHECK(c.ap_tx_dbm == 30.0);
  CHECK(c.tx_gain_dbi == 8.0);
  CHECK(c.rx_gain_dbi == 3.0);
  CHECK(c.noise_figure_db == 9.0);
  CHECK(c.shadow_sigma_db == 4.0);
  CHECK(c.nc_bs_tx_dbm == 46.0);
  CHECK(c.num_classes == 3);
  CHECK(c.contents_per_class == 5);
  CHECK(c.features_per_content == 10);
  CHECK(c.max_delay_slots == 10);
  CHECK(c.extraction_delay_slots == 5);
  CHECK(c.p_request_min == 0.1);
  CHECK(c.p_request_max == 1.0);
  CHECK(c.epsilon_min_cv == 0.0);
  CHECK(c.epsilon_max_cv == 1.0);
  CHECK(c.num_cvs == 10);
  CHECK(c.episode_slots == 1000);
  CHECK(c.v_max_mps == doctest::Approx(20.1168).epsilon(1e-12));
  CHECK(c.gamma == 0.995);
  CHECK(c.eps_start == 1.0);
  CHECK(c.eps_end == 0.005);
  CHECK(c.eps_decay_fraction == 0.6);
  CHECK(c.replay_capacity == 15000);
  CHECK(c.batch_size == 512);
  CHECK(c.target_sync_steps == 200);
  CHECK(c.learning_rate == 1e-3);
  CHECK(c.hidden_layers == std::vector<int>{256, 256});
  CHECK(c.delta_pop_sim == 1.0);
  CHECK(c.delta_hit == 0.5);
  CHECK(c.train_epochs == 2000);
  CHECK(c.per_class_units() == 3);
  CHECK(c.num_contents() == 15);
  CHECK(c.num_dois() == 20);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("JSON round trip and fingerprint") {
  SimConfig c;
  c.num_cvs = 7;
  c.policy = Policy::KLru;
  c.rat = Rat::NcRat;
  c.seeds = {4, 5};
  nlohmann::json j = c;
  const SimConfig back = j.get<SimConfig>();
  CHECK(nlohmann::json(back) == j);
  CHECK(back.fingerprint() == c.fingerprint());
  CHECK(c.fingerprint_hex().size() == 16);

  SimConfig moved = c;
  moved.out_dir = "elsewhere";
  moved.model_path = "m.json";
  CHECK(moved.fingerprint() == c.fingerprint());
  moved.num_cvs = 8;
  CHECK(moved.fingerprint() != c.fingerprint());
}

TEST_CASE("loading a partial config keeps the other defaults") {
  const SimConfig c = load_config(data_path("desk.json"));
  CHECK(c.episode_slots == 200);
  CHECK(c.num_cvs == 6);
  CHECK(c.cache_size_units == 6);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.policy == Policy::KPop);
  CHECK(c.rat == Rat::NcRat);
  CHECK(c.content_size_bits == 2500.0);
  CHECK(c.num_aps == 6);
}

TEST_CASE("bad configs are rejected") {
  CHECK_THROWS_AS(load_config(data_path("unknown_key.json")), ConfigError);
  CHECK_THROWS_AS(load_config(data_path("does_not_exist.json")), ConfigError);
  CHECK_THROWS_AS(parse_policy("lfu"), ConfigError);
  CHECK_THROWS_AS(parse_rat("wifi"), ConfigError);
  CHECK_THROWS_AS(nlohmann::json::parse(R"({"num_aps": "six"})").get<SimConfig>(), ConfigError);

  SimConfig c;
  c.cache_size_units = 10; // not a multiple of C
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.cache_size_units = 18; // 6 per class > F
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.grid_x_m = 250.0; // block does not divide
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.delta_hit = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.max_vcs = 7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.seeds.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = SimConfig{};
  c.episode_slots = 120; // not a whole number of DoIs
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("policy and RAT names round-trip") {
  for (Policy p : {Policy::Cpp, Policy::Genie, Policy::Rcr, Policy::KPop, Policy::KLru}) {
    CHECK(parse_policy(to_string(p)) == p);
  }
  for (Rat r : {Rat::UserCentric, Rat::NcRat, Rat::None}) CHECK(parse_rat(to_string(r)) == r);
}
