#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "vecsim/agent.hpp"
#include "vecsim/cache.hpp"
#include "vecsim/config.hpp"
#include "vecsim/content.hpp"
#include "vecsim/delivery.hpp"
#include "vecsim/mobility.hpp"

namespace vecsim {

struct EpisodeResult {
  std::vector<SlotMetrics> slots;
  std::vector<RequestOutcome> outcomes;
  std::vector<PlacementRecord> placements;
  EpisodeSummary summary;
};

// One episode of `config.policy` over `config.rat` on the stream of `seed`.
// `cpp` is required for the learned policy; `trace` replaces the built-in
// mobility model when given.
EpisodeResult run_episode(const SimConfig& config, const Environment& env, std::uint64_t seed,
                          const CppPolicy* cpp = nullptr, const PositionTrace* trace = nullptr);

struct SummaryRow {
  std::uint64_t seed = 0;
  Policy policy = Policy::Genie;
  Rat rat = Rat::UserCentric;
  int cache_size = 0;
  double content_size_bits = 0.0;
  int num_cvs = 0;
  EpisodeSummary summary;
};

SummaryRow summarize(const SimConfig& config, std::uint64_t seed, const EpisodeSummary& s);
void write_summary(const std::string& path, const std::vector<SummaryRow>& rows,
                   const std::string& fingerprint);

// Hash of the settings that shape training; evaluation-only fields (seeds,
// policy, RAT, content size, output paths) are ignored.
std::string training_fingerprint(const SimConfig& config);

// Trained placement networks keyed by training fingerprint, persisted as
// `<dir>/cpp-<fingerprint>.json` and trained on first use.
class ModelStore {
public:
  explicit ModelStore(std::string dir) : dir_(std::move(dir)) {}

  std::string path_for(const SimConfig& config) const;
  const CppPolicy& get(const SimConfig& config);
  // Writes the training curve next to a freshly trained model.
  std::string curve_path_for(const SimConfig& config) const;

private:
  std::string dir_;
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<CppPolicy>> loaded_;
};

enum class SweepAxis { CacheSize, ContentSize, NumCvs };
SweepAxis parse_axis(const std::string& name);
std::string to_string(SweepAxis a);

// Applies one axis value: cache size in units of S, content size in bits,
// or the number of CVs.
SimConfig with_axis(SimConfig config, SweepAxis axis, double value);

struct SweepSpec {
  SweepAxis axis = SweepAxis::CacheSize;
  std::vector<double> values;
  std::vector<Policy> policies;
  std::vector<Rat> rats;
  std::vector<std::uint64_t> seeds;
};

// Cross product of axis values, policies, RATs and seeds, one summary row per
// cell in that nesting order. Cells run in parallel.
std::vector<SummaryRow> run_sweep(const SimConfig& base, const SweepSpec& spec,
                                  ModelStore* models);

} // namespace vecsim
