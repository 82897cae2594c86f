#include "vecsim/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "vecsim/errors.hpp"
#include "vecsim/rng.hpp"

namespace vecsim {

Policy parse_policy(const std::string& name) {
  if (name == "cpp") return Policy::Cpp;
  if (name == "genie") return Policy::Genie;
  if (name == "rcr") return Policy::Rcr;
  if (name == "kpop") return Policy::KPop;
  if (name == "klru") return Policy::KLru;
  throw ConfigError("unknown policy '" + name + "'");
}

Rat parse_rat(const std::string& name) {
  if (name == "user-centric") return Rat::UserCentric;
  if (name == "nc-rat") return Rat::NcRat;
  if (name == "none") return Rat::None;
  throw ConfigError("unknown rat '" + name + "'");
}

std::string to_string(Policy p) {
  switch (p) {
  case Policy::Cpp: return "cpp";
  case Policy::Genie: return "genie";
  case Policy::Rcr: return "rcr";
  case Policy::KPop: return "kpop";
  case Policy::KLru: return "klru";
  }
  return "?";
}

std::string to_string(Rat r) {
  switch (r) {
  case Rat::UserCentric: return "user-centric";
  case Rat::NcRat: return "nc-rat";
  case Rat::None: return "none";
  }
  return "?";
}

#define VECSIM_CONFIG_FIELDS(X)                                                \
  X(num_aps) X(num_prbs) X(max_vcs) X(slot_seconds) X(doi_slots)               \
  X(carrier_ghz) X(prb_hz) X(noise_psd_dbm_hz) X(ap_coverage_m) X(antennas)    \
  X(ap_height_m) X(cv_height_m) X(ap_tx_dbm) X(tx_gain_dbi) X(rx_gain_dbi)     \
  X(noise_figure_db) X(shadow_sigma_db) X(nc_bs_tx_dbm) X(num_classes)         \
  X(contents_per_class) X(features_per_content) X(cache_size_units)            \
  X(content_size_bits) X(max_delay_slots) X(extraction_delay_slots)            \
  X(p_request_min) X(p_request_max) X(epsilon_min_cv) X(epsilon_max_cv)        \
  X(zipf_exponent) X(klru_swaps) X(num_cvs) X(episode_slots) X(env_seed)       \
  X(seeds) X(grid_x_m) X(grid_y_m) X(block_m) X(lane_offset_m) X(v_max_mps)    \
  X(trace_path) X(gamma) X(eps_start) X(eps_end) X(eps_decay_fraction)         \
  X(replay_capacity) X(batch_size) X(target_sync_steps) X(learning_rate)       \
  X(hidden_layers) X(delta_pop_sim) X(delta_hit) X(train_epochs) X(out_dir)    \
  X(model_path)

void to_json(nlohmann::json& j, const SimConfig& c) {
  j = nlohmann::json::object();
#define X(name) j[#name] = c.name;
  VECSIM_CONFIG_FIELDS(X)
#undef X
  j["policy"] = to_string(c.policy);
  j["rat"] = to_string(c.rat);
}

void from_json(const nlohmann::json& j, SimConfig& c) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  static const std::set<std::string> known = {
#define X(name) #name,
      VECSIM_CONFIG_FIELDS(X)
#undef X
      "policy", "rat"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  try {
#define X(name) if (j.contains(#name)) j.at(#name).get_to(c.name);
    VECSIM_CONFIG_FIELDS(X)
#undef X
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (j.contains("policy")) c.policy = parse_policy(j.at("policy").get<std::string>());
  if (j.contains("rat")) c.rat = parse_rat(j.at("rat").get<std::string>());
}

#undef VECSIM_CONFIG_FIELDS

void SimConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  require(num_aps >= 1, "num_aps must be >= 1");
  require(num_prbs >= 1, "num_prbs must be >= 1");
  require(max_vcs >= 1 && max_vcs <= num_aps, "max_vcs must lie in [1, num_aps]");
  require(slot_seconds > 0, "slot_seconds must be positive");
  require(doi_slots >= 1, "doi_slots must be >= 1");
  require(prb_hz > 0, "prb_hz must be positive");
  require(antennas >= 1, "antennas must be >= 1");
  require(num_classes >= 1 && contents_per_class >= 1 && features_per_content >= 1,
          "classes, contents and features must be >= 1");
  require(cache_size_units >= 0, "cache_size_units must be non-negative");
  require(cache_size_units % num_classes == 0,
          "cache_size_units must split evenly across classes");
  require(per_class_units() <= contents_per_class,
          "per-class budget exceeds the class size");
  require(content_size_bits > 0, "content_size_bits must be positive");
  require(max_delay_slots >= 1, "max_delay_slots must be >= 1");
  require(extraction_delay_slots >= 0, "extraction_delay_slots must be >= 0");
  require(p_request_min > 0 && p_request_min <= p_request_max && p_request_max <= 1,
          "request probability range must satisfy 0 < min <= max <= 1");
  require(epsilon_min_cv >= 0 && epsilon_min_cv <= epsilon_max_cv && epsilon_max_cv <= 1,
          "exploitation probability range must lie in [0, 1]");
  require(klru_swaps >= 0, "klru_swaps must be >= 0");
  require(num_cvs >= 1, "num_cvs must be >= 1");
  require(episode_slots >= 1, "episode_slots must be >= 1");
  // Server deadlines end at DoI boundaries, so a whole number of DoIs retires
  // every request by the last slot.
  require(episode_slots % doi_slots == 0, "episode_slots must be a multiple of doi_slots");
  require(!seeds.empty(), "seeds must be non-empty");
  require(grid_x_m > 0 && grid_y_m > 0 && block_m > 0, "grid extents must be positive");
  auto divides = [](double extent, double step) {
    double q = extent / step;
    return std::abs(q - std::round(q)) < 1e-9;
  };
  require(divides(grid_x_m, block_m) && divides(grid_y_m, block_m),
          "block spacing must divide the grid extents");
  require(lane_offset_m >= 0 && lane_offset_m < block_m / 2, "lane offset out of range");
  require(v_max_mps > 0, "v_max_mps must be positive");
  require(gamma >= 0 && gamma <= 1, "gamma must lie in [0, 1]");
  require(eps_start >= eps_end && eps_end >= 0 && eps_start <= 1, "bad epsilon schedule");
  require(eps_decay_fraction > 0, "eps_decay_fraction must be positive");
  require(replay_capacity >= 1 && batch_size >= 1, "replay capacity and batch must be >= 1");
  require(target_sync_steps >= 1, "target_sync_steps must be >= 1");
  require(learning_rate > 0, "learning_rate must be positive");
  for (int h : hidden_layers) require(h >= 1, "hidden layer widths must be >= 1");
  require(delta_pop_sim > delta_hit && delta_hit > 0,
          "reward weights must satisfy delta_pop_sim > delta_hit > 0");
  require(train_epochs >= 1, "train_epochs must be >= 1");
}

std::uint64_t SimConfig::fingerprint() const {
  nlohmann::json j = *this;
  // Output locations do not change results.
  j.erase("out_dir");
  j.erase("model_path");
  return fnv1a64(j.dump());
}

std::string SimConfig::fingerprint_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fingerprint()));
  return buf;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  SimConfig c = j.get<SimConfig>();
  c.validate();
  return c;
}

} // namespace vecsim
