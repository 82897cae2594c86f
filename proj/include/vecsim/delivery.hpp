#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vecsim/cache.hpp"
#include "vecsim/config.hpp"
#include "vecsim/content.hpp"
#include "vecsim/mobility.hpp"
#include "vecsim/partition.hpp"
#include "vecsim/radio.hpp"
#include "vecsim/scheduler.hpp"

namespace vecsim {

struct SlotMetrics {
  int slot = 0;
  int requests = 0;
  int hits = 0;
  int scheduled = 0;
  double wsr = 0.0;
  int completions = 0;
  long long delay_sum = 0; // slots, over this slot's completions
  int violations = 0;

  std::optional<double> hit_ratio() const { return chr(hits, requests); }
  std::optional<double> mean_delay() const;
};

// Final state of a request that left the ledger.
struct RequestOutcome {
  Request request;
  bool violated = false;
  int delay = 0;            // completion - arrival + 1, completions only
  double delivered_bits = 0.0;
  double scheduled_capacity_bits = 0.0; // sum of the CV's slot budgets while draining it
};

// Active requests with their live remaining deadline and payload.
struct OutstandingLedger {
  std::vector<Request> active;
  std::vector<RequestOutcome> finished;
  // Bits granted to the request's CV in slots where it was drained, per
  // active entry.
  std::vector<double> capacity;
  std::vector<double> delivered; // bits sent so far, per active entry
};

// Per-slot radio decision of either RAT, reduced to bits per scheduled CV.
struct RadioDecision {
  std::vector<int> scheduled_cvs;
  std::vector<double> bits;
  double wsr = 0.0;
  int config_index = -1;
};

// Fixed per-run radio state.
struct RadioContext {
  NetworkLayout layout;
  LinkBudget ap_budget;
  LinkBudget nc_budget;
  Vec3 nc_site;
  PartitionCache partitions;
};

RadioContext make_radio_context(const SimConfig& config);

// Marks hit or miss for each new request and appends it to the ledger.
void intake(OutstandingLedger& ledger, std::span<const Request> arrivals, const CacheState& cache,
            const SimConfig& config, int t, SlotMetrics& metrics);

// User-centric decision: EDF scheduling, optimal VC configuration and pRB
// matching, then per-CV bits from the literal SNR.
RadioDecision user_centric_decision(const OutstandingLedger& ledger, int t,
                                    const SimConfig& config, const ChannelTable& channels,
                                    RadioContext& radio);

// Network-centric baseline: one base station, priority-proportional power,
// rows replicated round-robin so every pRB is used.
RadioDecision nc_rat_decision(const OutstandingLedger& ledger, int t, const SimConfig& config,
                              const ChannelTable& channels, const RadioContext& radio);

// Transmit power of each scheduled CV under the NC-RAT split, in mW.
std::vector<double> nc_power_split_mw(std::span<const double> phi, double total_dbm);

// Drains each scheduled CV's eligible requests oldest arrival first, then
// ages every outstanding request and retires completions and violations.
void drain_and_age(OutstandingLedger& ledger, const RadioDecision& decision, int t,
                   int max_delay_slots, SlotMetrics& metrics);

// Channel gains of every transmitter to every CV for the positions of slot t.
ChannelTable draw_ap_channels(const SimConfig& config, const RadioContext& radio,
                              std::span<const Vec2> positions, Rng& rng);
ChannelTable draw_nc_channels(const SimConfig& config, const RadioContext& radio,
                              std::span<const Vec2> positions, Rng& rng);

// One full delivery slot with the configured RAT.
SlotMetrics step(OutstandingLedger& ledger, std::span<const Request> arrivals,
                 const CacheState& cache, int t, const SimConfig& config,
                 std::span<const Vec2> positions, Rng& channel_rng, RadioContext& radio);

struct EpisodeSummary {
  int requests = 0;
  int hits = 0;
  int completions = 0;
  int violations = 0;
  std::optional<double> chr;        // mean over request-bearing slots
  std::optional<double> mean_delay; // mean over completed requests
  std::optional<double> violation_pct;
};

EpisodeSummary episode_metrics(std::span<const SlotMetrics> slots, bool delivered);

void write_slot_metrics(const std::string& path, std::span<const SlotMetrics> slots,
                        const std::string& fingerprint);

} // namespace vecsim
