#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace vecsim {

enum class Policy { Cpp, Genie, Rcr, KPop, KLru };
// None skips radio delivery; hit ratios do not depend on it.
enum class Rat { UserCentric, NcRat, None };

Policy parse_policy(const std::string& name);
Rat parse_rat(const std::string& name);
std::string to_string(Policy p);
std::string to_string(Rat r);

inline constexpr double kMilesPerHourToMps = 0.44704;
// Content sizes quoted as "KB" are read as kilobits; see README.
inline constexpr double kBitsPerKb = 1000.0;

// Every knob of a run. Defaults reproduce the reference system table; any
// field may be overridden from JSON.
struct SimConfig {
  // Radio access network.
  int num_aps = 6;
  int num_prbs = 6;
  int max_vcs = 5;
  double slot_seconds = 1e-3;
  int doi_slots = 50;
  double carrier_ghz = 2.0;
  double prb_hz = 180e3;
  double noise_psd_dbm_hz = -174.0;
  double ap_coverage_m = 250.0;
  int antennas = 4;
  double ap_height_m = 25.0;
  double cv_height_m = 1.5;
  double ap_tx_dbm = 30.0;
  double tx_gain_dbi = 8.0;
  double rx_gain_dbi = 3.0;
  double noise_figure_db = 9.0;
  double shadow_sigma_db = 4.0;
  double nc_bs_tx_dbm = 46.0;

  // Content and caching.
  int num_classes = 3;
  int contents_per_class = 5;
  int features_per_content = 10;
  int cache_size_units = 9; // total budget in units of the content size
  double content_size_bits = 4.0 * kBitsPerKb;
  int max_delay_slots = 10;
  int extraction_delay_slots = 5;
  double p_request_min = 0.1;
  double p_request_max = 1.0;
  double epsilon_min_cv = 0.0;
  double epsilon_max_cv = 1.0;
  double zipf_exponent = 1.0;
  int klru_swaps = 1;

  // Population and episodes.
  int num_cvs = 10;
  int episode_slots = 1000;
  std::uint64_t env_seed = 1;
  std::vector<std::uint64_t> seeds{1};
  Policy policy = Policy::Genie;
  Rat rat = Rat::UserCentric;

  // Mobility.
  double grid_x_m = 300.0;
  double grid_y_m = 200.0;
  double block_m = 100.0;
  double lane_offset_m = 0.0;
  double v_max_mps = 45.0 * kMilesPerHourToMps;
  std::string trace_path;

  // Cache placement agent.
  double gamma = 0.995;
  double eps_start = 1.0;
  double eps_end = 0.005;
  double eps_decay_fraction = 0.6;
  int replay_capacity = 15000;
  int batch_size = 512;
  int target_sync_steps = 200; // gradient steps between target copies
  double learning_rate = 1e-3;
  std::vector<int> hidden_layers{256, 256};
  double delta_pop_sim = 1.0;
  double delta_hit = 0.5;
  int train_epochs = 2000;

  // Outputs.
  std::string out_dir = "out";
  std::string model_path;

  int per_class_units() const { return cache_size_units / num_classes; }
  int num_contents() const { return num_classes * contents_per_class; }
  int num_dois() const { return (episode_slots + doi_slots - 1) / doi_slots; }

  // Throws ConfigError on any infeasible combination.
  void validate() const;

  // Stable hash of the canonical JSON form.
  std::uint64_t fingerprint() const;
  std::string fingerprint_hex() const;
};

void to_json(nlohmann::json& j, const SimConfig& c);
void from_json(const nlohmann::json& j, SimConfig& c);

SimConfig load_config(const std::string& path);

} // namespace vecsim
