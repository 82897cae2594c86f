#include "vecsim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "vecsim/errors.hpp"

namespace vecsim {

std::vector<int> soi(int t, int max_delay_slots) {
  std::set<int> slots;
  for (int z = 1; z <= max_delay_slots; ++z) slots.insert(std::max(0, t - max_delay_slots + z));
  return {slots.begin(), slots.end()};
}

EligibilityResult eligible_cvs(std::span<const int> soi_slots, std::span<const Request> requests,
                               int t) {
  struct Best {
    int deadline;
    int arrival;
    double payload;
  };
  std::vector<std::pair<int, Best>> best; // (cv, best request)
  for (const auto& r : requests) {
    if (!std::binary_search(soi_slots.begin(), soi_slots.end(), r.arrival_slot)) continue;
    const bool available = r.cache_hit || r.extraction_ready_slot <= t;
    if (!available || r.remaining_deadline <= 0 || r.remaining_payload <= 0.0) continue;
    auto it = std::find_if(best.begin(), best.end(), [&](const auto& e) { return e.first == r.cv_id; });
    Best cand{r.remaining_deadline, r.arrival_slot, r.remaining_payload};
    if (it == best.end()) {
      best.emplace_back(r.cv_id, cand);
    } else if (cand.deadline < it->second.deadline ||
               (cand.deadline == it->second.deadline && cand.arrival < it->second.arrival)) {
      it->second = cand;
    }
  }
  std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  EligibilityResult out;
  for (const auto& [cv, b] : best) {
    out.valid_cvs.push_back(cv);
    out.min_deadlines.push_back(b.deadline);
    out.payloads.push_back(b.payload);
  }
  return out;
}

int vc_count(int n_valid, int max_vcs) { return std::max(0, std::min(n_valid, max_vcs)); }

std::vector<double> priorities(std::span<const int> deadlines) {
  double total = 0.0;
  for (int d : deadlines) {
    if (d <= 0) throw ContractViolation("priority of a request without remaining deadline");
    total += d;
  }
  std::vector<double> raw(deadlines.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < deadlines.size(); ++i) {
    raw[i] = total / deadlines[i];
    norm += raw[i];
  }
  for (double& x : raw) x /= norm;
  return raw;
}

std::vector<int> top_priority(const EligibilityResult& elig, int count) {
  std::vector<int> idx(elig.valid_cvs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (elig.min_deadlines[a] != elig.min_deadlines[b]) {
      return elig.min_deadlines[a] < elig.min_deadlines[b];
    }
    if (elig.payloads[a] != elig.payloads[b]) return elig.payloads[a] > elig.payloads[b];
    return elig.valid_cvs[a] < elig.valid_cvs[b];
  });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(count, 0))));
  return idx;
}

namespace {

// Weighted spectral efficiency of AP b serving the i-th scheduled CV on each
// pRB, laid out [i][b][z].
std::vector<double> weighted_rates(std::span<const int> scheduled, std::span<const double> phi,
                                   const ChannelTable& channels, const LinkBudget& budget) {
  const int B = channels.aps();
  const int Z = channels.prbs();
  const double snr_scale = budget.tx_scale_mw() / budget.noise_power_mw();
  std::vector<double> rates(scheduled.size() * B * Z);
  for (std::size_t i = 0; i < scheduled.size(); ++i) {
    for (int b = 0; b < B; ++b) {
      for (int z = 0; z < Z; ++z) {
        rates[(i * B + b) * Z + z] =
            std::log2(1.0 + snr_scale * channels.gain(b, scheduled[i], z)) * phi[i];
      }
    }
  }
  return rates;
}

void fill_matrix(WeightMatrix& m, const VcConfiguration& cfg, const std::vector<double>& rates,
                 int B, int Z) {
  for (int b = 0; b < B; ++b) {
    const double* src = &rates[(static_cast<std::size_t>(cfg.block_of_ap[b]) * B + b) * Z];
    std::copy(src, src + Z, &m.data[static_cast<std::size_t>(b) * Z]);
  }
}

void check_inputs(int num_blocks, std::span<const int> scheduled, std::span<const double> phi) {
  if (num_blocks < 1) throw ContractViolation("at least one virtual cell is required");
  if (static_cast<int>(scheduled.size()) != num_blocks || phi.size() != scheduled.size()) {
    throw ContractViolation("scheduled CV count must equal the number of virtual cells");
  }
}

VcDecision finish(int best, const std::vector<VcConfiguration>& configs,
                  const std::vector<double>& rates, int B, int Z) {
  VcDecision d;
  d.config_index = best;
  d.config = configs[best];
  WeightMatrix m(B, Z);
  fill_matrix(m, d.config, rates, B, Z);
  Matching match = hungarian(m);
  d.prb_of_ap = match.col_of_row;
  d.wsr = match.weight;
  return d;
}

} // namespace

WeightMatrix weighted_rate_matrix(std::span<const int> scheduled_cvs, const VcConfiguration& vc,
                                  std::span<const double> phi, const ChannelTable& channels,
                                  const LinkBudget& budget) {
  check_inputs(vc.size(), scheduled_cvs, phi);
  const int B = channels.aps();
  const int Z = channels.prbs();
  const double snr_scale = budget.tx_scale_mw() / budget.noise_power_mw();
  WeightMatrix m(B, Z);
  for (int i = 0; i < vc.size(); ++i) {
    for (int b : vc.blocks[i]) {
      for (int z = 0; z < Z; ++z) {
        m(b, z) = std::log2(1.0 + snr_scale * channels.gain(b, scheduled_cvs[i], z)) * phi[i];
      }
    }
  }
  return m;
}

std::vector<PrbGrant> VcDecision::grants_for_block(int block) const {
  std::vector<PrbGrant> out;
  for (int b : config.blocks[block]) {
    if (prb_of_ap[b] >= 0) out.push_back({b, prb_of_ap[b]});
  }
  return out;
}

VcDecision optimal_vc_and_prb_serial(int num_blocks, std::span<const int> scheduled_cvs,
                                     std::span<const double> phi, const ChannelTable& channels,
                                     const LinkBudget& budget, PartitionCache& partitions) {
  check_inputs(num_blocks, scheduled_cvs, phi);
  const int B = channels.aps();
  const int Z = channels.prbs();
  const auto& configs = partitions.get(B, num_blocks);
  const auto rates = weighted_rates(scheduled_cvs, phi, channels, budget);
  HungarianSolver solver;
  WeightMatrix m(B, Z);
  std::vector<int> assignment;
  int best = 0;
  double best_value = -1.0;
  for (std::size_t a = 0; a < configs.size(); ++a) {
    fill_matrix(m, configs[a], rates, B, Z);
    double value = solver.solve(m, assignment);
    if (value > best_value) {
      best_value = value;
      best = static_cast<int>(a);
    }
  }
  return finish(best, configs, rates, B, Z);
}

VcDecision optimal_vc_and_prb(int num_blocks, std::span<const int> scheduled_cvs,
                              std::span<const double> phi, const ChannelTable& channels,
                              const LinkBudget& budget, PartitionCache& partitions) {
#ifndef _OPENMP
  return optimal_vc_and_prb_serial(num_blocks, scheduled_cvs, phi, channels, budget, partitions);
#else
  check_inputs(num_blocks, scheduled_cvs, phi);
  const int B = channels.aps();
  const int Z = channels.prbs();
  const auto& configs = partitions.get(B, num_blocks);
  const auto rates = weighted_rates(scheduled_cvs, phi, channels, budget);
  const long n = static_cast<long>(configs.size());
  int best = 0;
  double best_value = -1.0;
#pragma omp parallel if (n > 256)
  {
    HungarianSolver solver;
    WeightMatrix m(B, Z);
    std::vector<int> assignment;
    int local_best = -1;
    double local_value = -1.0;
#pragma omp for schedule(static) nowait
    for (long a = 0; a < n; ++a) {
      fill_matrix(m, configs[a], rates, B, Z);
      double value = solver.solve(m, assignment);
      if (value > local_value) {
        local_value = value;
        local_best = static_cast<int>(a);
      }
    }
    // Static chunks are ordered, but thread completion is not: compare on
    // (value, index) so the first maximal index wins regardless.
#pragma omp critical(vecsim_vc_search)
    {
      if (local_best >= 0 &&
          (local_value > best_value || (local_value == best_value && local_best < best))) {
        best_value = local_value;
        best = local_best;
      }
    }
  }
  return finish(best, configs, rates, B, Z);
#endif
}

} // namespace vecsim
