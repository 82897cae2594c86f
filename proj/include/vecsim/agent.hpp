#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vecsim/cache.hpp"
#include "vecsim/content.hpp"
#include "vecsim/qnet.hpp"

namespace vecsim {

// Bijection between action indices and budget-feasible placements. Each
// class picks a k-subset of its F contents, ranked colexicographically; class
// 0 is the least significant digit of the mixed-radix index.
class ActionCodec {
public:
  ActionCodec() = default;
  explicit ActionCodec(const CacheBudgets& budgets);

  long long per_class_count() const { return per_class_count_; }
  long long total() const { return total_; }

  // DomainError for an index outside [0, total).
  CacheState decode(long long index) const;
  long long encode(const CacheState& state) const;

  static long long subset_rank(const std::vector<int>& sorted_subset);
  static std::vector<int> subset_unrank(long long rank, int k);

private:
  CacheBudgets budgets_;
  long long per_class_count_ = 0;
  long long total_ = 0;
};

long long binomial(int n, int k);

// Observation of the placement agent at a DoI boundary.
struct CppState {
  int num_cvs = 0;
  int classes = 0;
  int per_class = 0;
  std::vector<int> requests;  // U x C x F
  std::vector<int> hits;      // U x C x F
  std::vector<std::uint8_t> top; // C x F
  std::vector<double> popularity; // C x F, rows sum to 1 or are zero

  std::size_t flat_length() const {
    return 2 * requests.size() + top.size() + popularity.size();
  }
  // Network input: counts scaled by `count_scale`, then the top mask, then
  // measured popularity.
  std::vector<double> flatten(double count_scale) const;
};

// Per class, the top-k popular contents and each one's k most similar
// contents. Popularity comes from the history's aggregate counts, or from the
// library's generative popularity when the class saw no requests.
std::vector<std::uint8_t> top_mask(const RequestHistory& history, const ContentLibrary& lib,
                                   int k);

// State from the previous DoI's history; `cold` gives the first-DoI state.
CppState encode_state(const RequestHistory& history, const ContentLibrary& lib,
                      const CacheBudgets& budgets, bool cold);

// Per-content request and hit counts of one slot, class-major.
struct SlotCounts {
  std::vector<int> requests;
  std::vector<int> hits;
};

// Mean over the given slots of the per-slot reward summed over contents.
double compute_reward(std::span<const SlotCounts> slots, std::span<const std::uint8_t> top,
                      double delta_pop_sim, double delta_hit);

// Fixed-capacity FIFO experience memory.
class ReplayBuffer {
public:
  ReplayBuffer(int capacity, int state_dim);

  int capacity() const { return capacity_; }
  int size() const { return size_; }
  int state_dim() const { return dim_; }

  void push(std::span<const double> state, int action, double reward,
            std::span<const double> next_state, bool done);
  Transition at(int i) const; // i-th oldest entry
  // Uniform sample without replacement; ContractViolation when size < count.
  Batch sample(int count, Rng& rng);

private:
  int capacity_;
  int dim_;
  int size_ = 0;
  int cursor_ = 0;
  std::vector<double> states_;
  std::vector<double> next_states_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<std::uint8_t> done_;
  std::vector<int> scratch_;
};

// Epsilon-greedy over Q-values; greedy ties go to the lowest index.
int select_action(std::span<const double> q, double epsilon, Rng& rng);
int greedy_action(std::span<const double> q);

std::vector<int> network_dims(const SimConfig& config);

struct CurveRow {
  int epoch = 0;
  double epsilon = 0.0;
  double mean_return = 0.0;
  double loss = 0.0; // NaN when no update happened in the episode
};

struct TrainResult {
  QNetworkParams params;
  std::vector<CurveRow> curve;
  long train_steps = 0;
};

using TrainProgress = std::function<void(const CurveRow&)>;

// Offline learning of the placement policy with experience replay and a
// periodically synchronised target network.
TrainResult train_cpp(const SimConfig& config, const Environment& env,
                      const TrainProgress& progress = {});

void write_training_curve(const std::string& path, const std::vector<CurveRow>& curve,
                          const std::string& fingerprint);

// Greedy placement from a trained network.
class CppPolicy {
public:
  CppPolicy(QNetworkParams params, const SimConfig& config);

  CacheState place(const RequestHistory& history, const ContentLibrary& lib, bool cold) const;
  const QNetworkParams& params() const { return params_; }

private:
  QNetworkParams params_;
  CacheBudgets budgets_;
  ActionCodec codec_;
  double count_scale_;
};

void save_model(const std::string& path, const QNetworkParams& params, const SimConfig& config);
// ConfigError when the model was trained for a different population, library
// shape or budget.
QNetworkParams load_model(const std::string& path, const SimConfig& config);

} // namespace vecsim
