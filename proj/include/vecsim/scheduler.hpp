#pragma once

#include <span>
#include <vector>

#include "vecsim/content.hpp"
#include "vecsim/hungarian.hpp"
#include "vecsim/partition.hpp"
#include "vecsim/radio.hpp"

namespace vecsim {

// Slots whose requests may still be pending at slot t: {max(0, t - d + z)}
// for z = 1..d, as an ascending set.
std::vector<int> soi(int t, int max_delay_slots);

struct EligibilityResult {
  std::vector<int> valid_cvs;          // ascending CV id
  std::vector<int> min_deadlines;      // slots, aligned with valid_cvs
  std::vector<double> payloads;        // bits of the min-deadline request
};

// A CV is eligible when it has a request that arrived in the SoI, is available
// at the edge (cached, or extracted from the cloud by slot t) and still has
// deadline and payload left. Ties on the minimum deadline go to the earliest
// arrival.
EligibilityResult eligible_cvs(std::span<const int> soi_slots, std::span<const Request> requests,
                               int t);

int vc_count(int n_valid, int max_vcs);

// Normalised inverse-deadline weights. ContractViolation on a zero deadline.
std::vector<double> priorities(std::span<const int> deadlines);

// Indices into the eligibility result of the W highest-priority CVs, highest
// first. Equal deadlines prefer the larger payload, then the lower CV id.
std::vector<int> top_priority(const EligibilityResult& elig, int count);

// Rows are APs, columns pRBs. Row b holds log2(1 + SNR_b) * phi of the CV that
// the AP's block serves; the i-th block serves the i-th scheduled CV.
WeightMatrix weighted_rate_matrix(std::span<const int> scheduled_cvs, const VcConfiguration& vc,
                                  std::span<const double> phi, const ChannelTable& channels,
                                  const LinkBudget& budget);

struct VcDecision {
  int config_index = -1;
  VcConfiguration config;
  std::vector<int> prb_of_ap; // -1 when the AP is idle
  double wsr = 0.0;

  std::vector<PrbGrant> grants_for_block(int block) const;
};

// Linear search over every ordered configuration of W blocks, solving the
// pRB matching of each with the Hungarian method. The first configuration
// attaining the maximum wins. Uses OpenMP across configurations when enabled.
VcDecision optimal_vc_and_prb(int num_blocks, std::span<const int> scheduled_cvs,
                              std::span<const double> phi, const ChannelTable& channels,
                              const LinkBudget& budget, PartitionCache& partitions);

// Single-threaded reference of the same search.
VcDecision optimal_vc_and_prb_serial(int num_blocks, std::span<const int> scheduled_cvs,
                                     std::span<const double> phi, const ChannelTable& channels,
                                     const LinkBudget& budget, PartitionCache& partitions);

} // namespace vecsim
