#include "vecsim/experiment.hpp"

#include <cmath>
#include <filesystem>

#include "vecsim/csv.hpp"
#include "vecsim/errors.hpp"
#include "vecsim/parallel.hpp"

namespace vecsim {

namespace {

std::vector<int> upcoming_counts(const RequestStream& stream, int begin, int end, int F,
                                 int num_contents) {
  std::vector<int> counts(num_contents, 0);
  for (int t = begin; t < end; ++t) {
    for (const auto& r : stream[t]) ++counts[r.content.cls * F + r.content.index];
  }
  return counts;
}

} // namespace

EpisodeResult run_episode(const SimConfig& config, const Environment& env, std::uint64_t seed,
                          const CppPolicy* cpp, const PositionTrace* trace) {
  config.validate();
  if (config.policy == Policy::Cpp && cpp == nullptr) {
    throw ConfigError("policy cpp needs a trained model");
  }
  const CacheBudgets budgets = budgets_from(config);
  const int T = config.episode_slots;
  const int F = config.contents_per_class;
  const RequestStream stream = episode_stream(config, env, seed);

  RadioContext radio = make_radio_context(config);
  PositionTrace positions;
  if (config.rat != Rat::None) {
    if (trace) {
      if (trace->num_slots() < T || trace->num_cvs() < config.num_cvs) {
        throw ConfigError("mobility trace covers " + std::to_string(trace->num_slots()) +
                          " slots and " + std::to_string(trace->num_cvs()) + " CVs; need " +
                          std::to_string(T) + " and " + std::to_string(config.num_cvs));
      }
      positions = *trace;
    } else {
      Rng mobility = substream(seed, "mobility");
      positions = simulate_trace(radio.layout.roads, config.num_cvs, T, config.slot_seconds,
                                 config.v_max_mps, mobility);
    }
  }
  Rng channel_rng = substream(seed, "channel");
  Rng policy_rng = substream(seed, "policy");

  EpisodeResult result;
  OutstandingLedger ledger;
  RequestHistory previous(config.num_cvs, config.num_classes, F);
  RequestHistory current(config.num_cvs, config.num_classes, F);
  CacheState cache(budgets);
  std::vector<Vec2> slot_positions(config.num_cvs);
  for (int t = 0; t < T; ++t) {
    if (t % config.doi_slots == 0) {
      const int n = t / config.doi_slots;
      if (n > 0) std::swap(previous, current);
      current.clear();
      switch (config.policy) {
      case Policy::Genie:
        cache = place_genie(upcoming_counts(stream, t, std::min(T, t + config.doi_slots), F,
                                            config.num_contents()),
                            budgets);
        break;
      case Policy::Rcr: cache = place_rcr(budgets, policy_rng); break;
      case Policy::KPop: cache = place_kpop(previous, budgets); break;
      case Policy::KLru: cache = place_klru(previous, budgets, config.klru_swaps); break;
      case Policy::Cpp: cache = cpp->place(previous, env.library, n == 0); break;
      }
      cache.set_epoch(n);
      if (!cache.satisfies_budgets()) {
        throw SimulationError("placement at epoch " + std::to_string(n) + " breaks the budgets");
      }
      result.placements.push_back({n, cache});
    }
    for (const auto& r : stream[t]) current.record(r, cache.stored(r.content), t);
    if (config.rat != Rat::None) {
      for (int u = 0; u < config.num_cvs; ++u) slot_positions[u] = positions.at(t, u);
    }
    result.slots.push_back(
        step(ledger, stream[t], cache, t, config, slot_positions, channel_rng, radio));
  }
  if (!ledger.active.empty()) {
    throw SimulationError(std::to_string(ledger.active.size()) +
                          " requests still outstanding after the last slot");
  }
  result.outcomes = std::move(ledger.finished);
  result.summary = episode_metrics(result.slots, config.rat != Rat::None);
  return result;
}

SummaryRow summarize(const SimConfig& config, std::uint64_t seed, const EpisodeSummary& s) {
  return {seed, config.policy, config.rat, config.cache_size_units, config.content_size_bits,
          config.num_cvs, s};
}

void write_summary(const std::string& path, const std::vector<SummaryRow>& rows,
                   const std::string& fingerprint) {
  CsvWriter w(path, fingerprint,
              {"seed", "policy", "rat", "cache_size", "content_size", "U", "chr", "mean_delay",
               "violation_pct"});
  auto opt = [&](const std::optional<double>& v) {
    if (v) {
      w.field(*v);
    } else {
      w.field(std::string_view{});
    }
  };
  for (const auto& r : rows) {
    w.field(static_cast<long long>(r.seed)).field(to_string(r.policy)).field(to_string(r.rat));
    w.field(r.cache_size).field(r.content_size_bits).field(r.num_cvs);
    opt(r.summary.chr);
    opt(r.summary.mean_delay);
    opt(r.summary.violation_pct);
    w.end_row();
  }
}

std::string training_fingerprint(const SimConfig& config) {
  SimConfig c = config;
  const SimConfig defaults;
  c.seeds = defaults.seeds;
  c.policy = defaults.policy;
  c.rat = defaults.rat;
  c.content_size_bits = defaults.content_size_bits;
  c.trace_path.clear();
  return c.fingerprint_hex();
}

std::string ModelStore::path_for(const SimConfig& config) const {
  return (std::filesystem::path(dir_) / ("cpp-" + training_fingerprint(config) + ".json"))
      .string();
}

std::string ModelStore::curve_path_for(const SimConfig& config) const {
  return (std::filesystem::path(dir_) / ("curve-" + training_fingerprint(config) + ".csv"))
      .string();
}

const CppPolicy& ModelStore::get(const SimConfig& config) {
  const std::string key = training_fingerprint(config);
  {
    std::lock_guard lock(mutex_);
    auto it = loaded_.find(key);
    if (it != loaded_.end()) return *it->second;
  }
  const std::string path = path_for(config);
  QNetworkParams params;
  if (std::filesystem::exists(path)) {
    params = load_model(path, config);
  } else {
    std::filesystem::create_directories(dir_);
    const Environment env = build_environment(config);
    TrainResult trained = train_cpp(config, env);
    write_training_curve(curve_path_for(config), trained.curve, config.fingerprint_hex());
    // Write then rename so an interrupted run never leaves a partial model.
    const std::string tmp = path + ".tmp";
    save_model(tmp, trained.params, config);
    std::filesystem::rename(tmp, path);
    params = std::move(trained.params);
  }
  std::lock_guard lock(mutex_);
  auto& slot = loaded_[key];
  if (!slot) slot = std::make_unique<CppPolicy>(std::move(params), config);
  return *slot;
}

SweepAxis parse_axis(const std::string& name) {
  if (name == "cache_size") return SweepAxis::CacheSize;
  if (name == "content_size") return SweepAxis::ContentSize;
  if (name == "num_cvs") return SweepAxis::NumCvs;
  throw ConfigError("unknown sweep axis '" + name + "'");
}

std::string to_string(SweepAxis a) {
  switch (a) {
  case SweepAxis::CacheSize: return "cache_size";
  case SweepAxis::ContentSize: return "content_size";
  case SweepAxis::NumCvs: return "num_cvs";
  }
  return "?";
}

SimConfig with_axis(SimConfig config, SweepAxis axis, double value) {
  switch (axis) {
  case SweepAxis::CacheSize:
    if (value != std::floor(value)) throw ConfigError("cache_size values must be integers");
    config.cache_size_units = static_cast<int>(value);
    break;
  case SweepAxis::ContentSize: config.content_size_bits = value; break;
  case SweepAxis::NumCvs:
    if (value != std::floor(value)) throw ConfigError("num_cvs values must be integers");
    config.num_cvs = static_cast<int>(value);
    break;
  }
  config.validate();
  return config;
}

std::vector<SummaryRow> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                  ModelStore* models) {
  if (spec.values.empty()) throw ConfigError("sweep needs at least one axis value");
  if (spec.policies.empty() || spec.rats.empty() || spec.seeds.empty()) {
    throw ConfigError("sweep needs policies, RATs and seeds");
  }
  struct Cell {
    SimConfig config;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double v : spec.values) {
    const SimConfig axis_config = with_axis(base, spec.axis, v);
    for (Policy p : spec.policies) {
      for (Rat r : spec.rats) {
        for (std::uint64_t s : spec.seeds) {
          SimConfig c = axis_config;
          c.policy = p;
          c.rat = r;
          cells.push_back({c, s});
        }
      }
    }
  }

  // Train every distinct model first so cells only read the store.
  std::vector<SimConfig> to_train;
  for (const auto& cell : cells) {
    if (cell.config.policy != Policy::Cpp) continue;
    if (!models) throw ConfigError("policy cpp in a sweep needs a model directory");
    bool seen = false;
    for (const auto& c : to_train) {
      seen = seen || training_fingerprint(c) == training_fingerprint(cell.config);
    }
    if (!seen) to_train.push_back(cell.config);
  }
  parallel_for(static_cast<long>(to_train.size()), [&](long i) { models->get(to_train[i]); });

  std::vector<SummaryRow> rows(cells.size());
  std::map<std::string, Environment> envs;
  for (const auto& cell : cells) {
    const std::string key = cell.config.fingerprint_hex();
    if (!envs.count(key)) envs.emplace(key, build_environment(cell.config));
  }
  parallel_for(static_cast<long>(cells.size()), [&](long i) {
    const auto& cell = cells[i];
    const CppPolicy* cpp = cell.config.policy == Policy::Cpp ? &models->get(cell.config) : nullptr;
    const auto& env = envs.at(cell.config.fingerprint_hex());
    const EpisodeResult r = run_episode(cell.config, env, cell.seed, cpp);
    rows[i] = summarize(cell.config, cell.seed, r.summary);
  });
  return rows;
}

} // namespace vecsim
