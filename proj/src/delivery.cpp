#include "vecsim/delivery.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vecsim/csv.hpp"
#include "vecsim/deadline.hpp"
#include "vecsim/errors.hpp"
#include "vecsim/hungarian.hpp"

namespace vecsim {

std::optional<double> SlotMetrics::mean_delay() const {
  if (completions == 0) return std::nullopt;
  return static_cast<double>(delay_sum) / completions;
}

RadioContext make_radio_context(const SimConfig& config) {
  RadioContext ctx;
  ctx.layout = build_network(config);
  ctx.ap_budget = ap_link_budget(config);
  ctx.nc_budget = ctx.ap_budget;
  ctx.nc_budget.tx_power_dbm = config.nc_bs_tx_dbm;
  ctx.nc_site = {config.grid_x_m / 2.0, config.grid_y_m / 2.0, config.ap_height_m};
  return ctx;
}

void intake(OutstandingLedger& ledger, std::span<const Request> arrivals, const CacheState& cache,
            const SimConfig& config, int t, SlotMetrics& metrics) {
  for (Request r : arrivals) {
    if (r.arrival_slot != t) throw SimulationError("request stream out of order at slot " +
                                                   std::to_string(t));
    r.cache_hit = cache.stored(r.content);
    r.extraction_ready_slot = r.cache_hit ? t : t + config.extraction_delay_slots;
    r.remaining_payload = config.content_size_bits;
    r.server_deadline = server_deadline(t, config.doi_slots, config.max_delay_slots);
    r.remaining_deadline = r.server_deadline;
    ++metrics.requests;
    if (r.cache_hit) ++metrics.hits;
    ledger.active.push_back(r);
    ledger.capacity.push_back(0.0);
    ledger.delivered.push_back(0.0);
  }
}

namespace {

struct Schedule {
  std::vector<int> cvs;
  std::vector<double> phi;
};

Schedule edf_schedule(const OutstandingLedger& ledger, int t, const SimConfig& config) {
  const auto slots = soi(t, config.max_delay_slots);
  const EligibilityResult elig = eligible_cvs(slots, ledger.active, t);
  const int w = std::min(vc_count(static_cast<int>(elig.valid_cvs.size()), config.max_vcs),
                         config.num_aps);
  Schedule s;
  if (w == 0) return s;
  const auto phi = priorities(elig.min_deadlines);
  for (int i : top_priority(elig, w)) {
    s.cvs.push_back(elig.valid_cvs[i]);
    s.phi.push_back(phi[i]);
  }
  return s;
}

bool drainable(const Request& r, int t, int max_delay_slots) {
  return r.arrival_slot > t - max_delay_slots && r.arrival_slot <= t &&
         (r.cache_hit || r.extraction_ready_slot <= t) && r.remaining_deadline > 0 &&
         r.remaining_payload > 0.0;
}

} // namespace

RadioDecision user_centric_decision(const OutstandingLedger& ledger, int t,
                                    const SimConfig& config, const ChannelTable& channels,
                                    RadioContext& radio) {
  RadioDecision d;
  const Schedule s = edf_schedule(ledger, t, config);
  if (s.cvs.empty()) return d;
  const int w = static_cast<int>(s.cvs.size());
  const VcDecision vc =
      optimal_vc_and_prb(w, s.cvs, s.phi, channels, radio.ap_budget, radio.partitions);
  d.scheduled_cvs = s.cvs;
  d.wsr = vc.wsr;
  d.config_index = vc.config_index;
  for (int i = 0; i < w; ++i) {
    const auto grants = vc.grants_for_block(i);
    const auto snr = snr_per_prb(vc.config.blocks[i], s.cvs[i], grants, channels, radio.ap_budget);
    d.bits.push_back(tx_bits(rate_bps(snr, config.prb_hz), config.slot_seconds));
  }
  return d;
}

std::vector<double> nc_power_split_mw(std::span<const double> phi, double total_dbm) {
  const double total = db_to_linear(total_dbm);
  const double sum = std::accumulate(phi.begin(), phi.end(), 0.0);
  std::vector<double> out;
  for (double p : phi) out.push_back(total * p / sum);
  return out;
}

RadioDecision nc_rat_decision(const OutstandingLedger& ledger, int t, const SimConfig& config,
                              const ChannelTable& channels, const RadioContext& radio) {
  RadioDecision d;
  const Schedule s = edf_schedule(ledger, t, config);
  if (s.cvs.empty()) return d;
  const int w = static_cast<int>(s.cvs.size());
  const int Z = channels.prbs();
  const auto power = nc_power_split_mw(s.phi, radio.nc_budget.tx_power_dbm);
  const double gains = db_to_linear(radio.nc_budget.tx_gain_dbi + radio.nc_budget.rx_gain_dbi);
  const double noise = radio.nc_budget.noise_power_mw();

  const int rows = std::max(w, Z);
  // Each CV's share is spread evenly over the pRBs its replicated rows claim,
  // so the base station never exceeds its total power.
  std::vector<int> row_count(w, 0);
  for (int r = 0; r < rows; ++r) ++row_count[r % w];
  WeightMatrix m(rows, Z);
  std::vector<double> snr(static_cast<std::size_t>(rows) * Z);
  for (int r = 0; r < rows; ++r) {
    const int i = r % w;
    const double per_prb = power[i] / std::min(row_count[i], Z);
    for (int z = 0; z < Z; ++z) {
      snr[static_cast<std::size_t>(r) * Z + z] = per_prb * gains * channels.gain(0, s.cvs[i], z) / noise;
      m(r, z) = std::log2(1.0 + snr[static_cast<std::size_t>(r) * Z + z]) * s.phi[i];
    }
  }
  const Matching match = hungarian(m);
  std::vector<double> rate(w, 0.0);
  for (int r = 0; r < rows; ++r) {
    const int z = match.col_of_row[r];
    if (z < 0) continue;
    rate[r % w] += config.prb_hz * std::log2(1.0 + snr[static_cast<std::size_t>(r) * Z + z]);
  }
  d.scheduled_cvs = s.cvs;
  d.wsr = match.weight;
  for (int i = 0; i < w; ++i) d.bits.push_back(tx_bits(rate[i], config.slot_seconds));
  return d;
}

void drain_and_age(OutstandingLedger& ledger, const RadioDecision& decision, int t,
                   int max_delay_slots, SlotMetrics& metrics) {
  metrics.scheduled = static_cast<int>(decision.scheduled_cvs.size());
  metrics.wsr = decision.wsr;
  for (std::size_t s = 0; s < decision.scheduled_cvs.size(); ++s) {
    const int cv = decision.scheduled_cvs[s];
    double budget = decision.bits[s];
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < ledger.active.size(); ++i) {
      const Request& r = ledger.active[i];
      if (r.cv_id == cv && drainable(r, t, max_delay_slots)) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return ledger.active[a].arrival_slot < ledger.active[b].arrival_slot;
    });
    for (std::size_t i : order) {
      if (budget <= 0.0) break;
      Request& r = ledger.active[i];
      const double take = std::min(budget, r.remaining_payload);
      r.remaining_payload -= take;
      budget -= take;
      ledger.delivered[i] += take;
      ++r.served_slots;
      ledger.capacity[i] += decision.bits[s];
    }
  }

  std::vector<Request> still;
  std::vector<double> still_capacity;
  std::vector<double> still_delivered;
  for (std::size_t i = 0; i < ledger.active.size(); ++i) {
    Request r = ledger.active[i];
    if (r.remaining_payload <= 0.0) {
      r.remaining_payload = 0.0;
      r.completion_slot = t;
      RequestOutcome out{r, false, t - r.arrival_slot + 1, ledger.delivered[i],
                         ledger.capacity[i]};
      ++metrics.completions;
      metrics.delay_sum += out.delay;
      ledger.finished.push_back(std::move(out));
      continue;
    }
    if (--r.remaining_deadline <= 0) {
      r.remaining_deadline = 0;
      ++metrics.violations;
      ledger.finished.push_back({r, true, 0, ledger.delivered[i], ledger.capacity[i]});
      continue;
    }
    still.push_back(r);
    still_capacity.push_back(ledger.capacity[i]);
    still_delivered.push_back(ledger.delivered[i]);
  }
  ledger.active = std::move(still);
  ledger.capacity = std::move(still_capacity);
  ledger.delivered = std::move(still_delivered);
}

ChannelTable draw_ap_channels(const SimConfig& config, const RadioContext& radio,
                              std::span<const Vec2> positions, Rng& rng) {
  const auto& aps = radio.layout.aps.coordinates;
  const int B = static_cast<int>(aps.size());
  const int U = static_cast<int>(positions.size());
  std::vector<double> d(static_cast<std::size_t>(B) * U);
  for (int b = 0; b < B; ++b) {
    for (int u = 0; u < U; ++u) d[static_cast<std::size_t>(b) * U + u] =
        distance_3d(aps[b], positions[u], config.cv_height_m);
  }
  return draw_channel_table(rng, d, B, U, config.num_prbs, config.antennas, config.carrier_ghz,
                            config.shadow_sigma_db);
}

ChannelTable draw_nc_channels(const SimConfig& config, const RadioContext& radio,
                              std::span<const Vec2> positions, Rng& rng) {
  std::vector<double> d;
  for (const Vec2& p : positions) d.push_back(distance_3d(radio.nc_site, p, config.cv_height_m));
  return draw_channel_table(rng, d, 1, static_cast<int>(positions.size()), config.num_prbs,
                            config.antennas, config.carrier_ghz, config.shadow_sigma_db);
}

SlotMetrics step(OutstandingLedger& ledger, std::span<const Request> arrivals,
                 const CacheState& cache, int t, const SimConfig& config,
                 std::span<const Vec2> positions, Rng& channel_rng, RadioContext& radio) {
  SlotMetrics metrics;
  metrics.slot = t;
  if (config.rat == Rat::None) {
    for (const Request& r : arrivals) {
      ++metrics.requests;
      if (cache.stored(r.content)) ++metrics.hits;
    }
    return metrics;
  }
  intake(ledger, arrivals, cache, config, t, metrics);
  RadioDecision decision;
  if (config.rat == Rat::UserCentric) {
    const ChannelTable channels = draw_ap_channels(config, radio, positions, channel_rng);
    decision = user_centric_decision(ledger, t, config, channels, radio);
  } else {
    const ChannelTable channels = draw_nc_channels(config, radio, positions, channel_rng);
    decision = nc_rat_decision(ledger, t, config, channels, radio);
  }
  drain_and_age(ledger, decision, t, config.max_delay_slots, metrics);
  return metrics;
}

EpisodeSummary episode_metrics(std::span<const SlotMetrics> slots, bool delivered) {
  EpisodeSummary s;
  double chr_sum = 0.0;
  int chr_slots = 0;
  long long delay_sum = 0;
  for (const auto& m : slots) {
    s.requests += m.requests;
    s.hits += m.hits;
    s.completions += m.completions;
    s.violations += m.violations;
    delay_sum += m.delay_sum;
    if (auto h = m.hit_ratio()) {
      chr_sum += *h;
      ++chr_slots;
    }
  }
  if (chr_slots > 0) s.chr = chr_sum / chr_slots;
  if (delivered) {
    if (s.completions > 0) s.mean_delay = static_cast<double>(delay_sum) / s.completions;
    s.violation_pct = s.requests > 0 ? 100.0 * s.violations / s.requests : 0.0;
  }
  return s;
}

namespace {

void optional_field(CsvWriter& w, const std::optional<double>& v) {
  if (v) {
    w.field(*v);
  } else {
    w.field(std::string_view{});
  }
}

} // namespace

void write_slot_metrics(const std::string& path, std::span<const SlotMetrics> slots,
                        const std::string& fingerprint) {
  CsvWriter w(path, fingerprint,
              {"slot", "requests", "hits", "chr", "scheduled", "wsr", "completions", "mean_delay",
               "violations"});
  for (const auto& m : slots) {
    w.field(m.slot).field(m.requests).field(m.hits);
    optional_field(w, m.hit_ratio());
    w.field(m.scheduled).field(m.wsr).field(m.completions);
    optional_field(w, m.mean_delay());
    w.field(m.violations);
    w.end_row();
  }
}

} // namespace vecsim
