#include "vecsim/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vecsim/csv.hpp"
#include "vecsim/errors.hpp"

namespace vecsim {

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------- codec

ActionCodec::ActionCodec(const CacheBudgets& budgets) : budgets_(budgets) {
  budgets.validate();
  per_class_count_ = binomial(budgets.per_class, budgets.per_class_units);
  total_ = 1;
  for (int c = 0; c < budgets.classes; ++c) {
    if (total_ > std::numeric_limits<long long>::max() / per_class_count_) {
      throw ConfigError("placement action space too large");
    }
    total_ *= per_class_count_;
  }
}

long long ActionCodec::subset_rank(const std::vector<int>& sorted_subset) {
  long long rank = 0;
  for (std::size_t i = 0; i < sorted_subset.size(); ++i) {
    rank += binomial(sorted_subset[i], static_cast<int>(i) + 1);
  }
  return rank;
}

std::vector<int> ActionCodec::subset_unrank(long long rank, int k) {
  std::vector<int> subset(k);
  for (int i = k; i >= 1; --i) {
    int c = i - 1;
    while (binomial(c + 1, i) <= rank) ++c;
    subset[i - 1] = c;
    rank -= binomial(c, i);
  }
  return subset;
}

CacheState ActionCodec::decode(long long index) const {
  if (index < 0 || index >= total_) {
    throw DomainError("action index " + std::to_string(index) + " outside [0, " +
                      std::to_string(total_) + ")");
  }
  CacheState state(budgets_);
  for (int c = 0; c < budgets_.classes; ++c) {
    const long long digit = index % per_class_count_;
    index /= per_class_count_;
    for (int f : subset_unrank(digit, budgets_.per_class_units)) state.set({c, f}, true);
  }
  return state;
}

long long ActionCodec::encode(const CacheState& state) const {
  if (!state.satisfies_budgets()) throw ContractViolation("placement violates the cache budgets");
  long long index = 0;
  long long weight = 1;
  for (int c = 0; c < budgets_.classes; ++c) {
    index += subset_rank(state.stored_in_class(c)) * weight;
    weight *= per_class_count_;
  }
  return index;
}

// ---------------------------------------------------------------- state

std::vector<double> CppState::flatten(double count_scale) const {
  std::vector<double> x;
  x.reserve(flat_length());
  for (int r : requests) x.push_back(r * count_scale);
  for (int h : hits) x.push_back(h * count_scale);
  for (auto t : top) x.push_back(t);
  x.insert(x.end(), popularity.begin(), popularity.end());
  return x;
}

std::vector<std::uint8_t> top_mask(const RequestHistory& history, const ContentLibrary& lib,
                                   int k) {
  const int C = lib.classes();
  const int F = lib.per_class();
  std::vector<std::uint8_t> top(static_cast<std::size_t>(C) * F, 0);
  for (int c = 0; c < C; ++c) {
    std::vector<int> counts(F);
    int total = 0;
    for (int f = 0; f < F; ++f) total += counts[f] = history.aggregate({c, f});
    const auto popular =
        total > 0 ? top_k_by_count(counts, k) : top_k_by_value(lib.popularity(c), k);
    for (int f : popular) {
      top[c * F + f] = 1;
      const auto& ranking = lib.similarity_ranking({c, f});
      for (int i = 0; i < k && i < static_cast<int>(ranking.size()); ++i) {
        top[c * F + ranking[i]] = 1;
      }
    }
  }
  return top;
}

CppState encode_state(const RequestHistory& history, const ContentLibrary& lib,
                      const CacheBudgets& budgets, bool cold) {
  CppState s;
  s.num_cvs = history.num_cvs();
  s.classes = lib.classes();
  s.per_class = lib.per_class();
  const int C = s.classes;
  const int F = s.per_class;
  s.requests.assign(static_cast<std::size_t>(s.num_cvs) * C * F, 0);
  s.hits.assign(s.requests.size(), 0);
  s.popularity.assign(static_cast<std::size_t>(C) * F, 0.0);
  if (cold) {
    RequestHistory empty(s.num_cvs, C, F);
    s.top = top_mask(empty, lib, budgets.per_class_units);
    return s;
  }
  std::size_t i = 0;
  for (int u = 0; u < s.num_cvs; ++u) {
    for (int c = 0; c < C; ++c) {
      for (int f = 0; f < F; ++f, ++i) {
        s.requests[i] = history.requests(u, {c, f});
        s.hits[i] = history.hits(u, {c, f});
      }
    }
  }
  for (int c = 0; c < C; ++c) {
    int total = 0;
    for (int f = 0; f < F; ++f) total += history.aggregate({c, f});
    if (total == 0) continue;
    for (int f = 0; f < F; ++f) {
      s.popularity[c * F + f] = static_cast<double>(history.aggregate({c, f})) / total;
    }
  }
  s.top = top_mask(history, lib, budgets.per_class_units);
  return s;
}

double compute_reward(std::span<const SlotCounts> slots, std::span<const std::uint8_t> top,
                      double delta_pop_sim, double delta_hit) {
  if (!(delta_pop_sim > delta_hit && delta_hit > 0.0)) {
    throw ContractViolation("reward weights must satisfy delta_pop_sim > delta_hit > 0");
  }
  if (slots.empty()) return 0.0;
  double total = 0.0;
  for (const auto& slot : slots) {
    for (std::size_t i = 0; i < slot.requests.size(); ++i) {
      const int req = slot.requests[i];
      const int hit = slot.hits[i];
      if (hit > 0) {
        total += (top[i] ? delta_pop_sim : delta_hit) * hit;
      } else if (req > 0) {
        total -= req;
      }
    }
  }
  return total / static_cast<double>(slots.size());
}

// ---------------------------------------------------------------- replay

ReplayBuffer::ReplayBuffer(int capacity, int state_dim) : capacity_(capacity), dim_(state_dim) {
  if (capacity < 1 || state_dim < 1) throw ConfigError("replay buffer needs positive sizes");
  states_.resize(static_cast<std::size_t>(capacity) * dim_);
  next_states_.resize(states_.size());
  actions_.resize(capacity);
  rewards_.resize(capacity);
  done_.resize(capacity);
}

void ReplayBuffer::push(std::span<const double> state, int action, double reward,
                        std::span<const double> next_state, bool done) {
  if (state.size() != static_cast<std::size_t>(dim_) || next_state.size() != state.size()) {
    throw DomainError("experience state length does not match the buffer");
  }
  const std::size_t off = static_cast<std::size_t>(cursor_) * dim_;
  std::copy(state.begin(), state.end(), states_.begin() + off);
  std::copy(next_state.begin(), next_state.end(), next_states_.begin() + off);
  actions_[cursor_] = action;
  rewards_[cursor_] = reward;
  done_[cursor_] = done ? 1 : 0;
  cursor_ = (cursor_ + 1) % capacity_;
  size_ = std::min(size_ + 1, capacity_);
}

Transition ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size_) throw ContractViolation("replay index out of range");
  const int slot = size_ < capacity_ ? i : (cursor_ + i) % capacity_;
  const std::size_t off = static_cast<std::size_t>(slot) * dim_;
  Transition t;
  t.state.assign(states_.begin() + off, states_.begin() + off + dim_);
  t.next_state.assign(next_states_.begin() + off, next_states_.begin() + off + dim_);
  t.action = actions_[slot];
  t.reward = rewards_[slot];
  t.done = done_[slot] != 0;
  return t;
}

Batch ReplayBuffer::sample(int count, Rng& rng) {
  if (count < 1 || count > size_) {
    throw ContractViolation("cannot sample " + std::to_string(count) + " of " +
                            std::to_string(size_) + " experiences");
  }
  scratch_.resize(size_);
  for (int i = 0; i < size_; ++i) scratch_[i] = i;
  Batch b;
  b.size = count;
  b.states.resize(static_cast<std::size_t>(count) * dim_);
  b.next_states.resize(b.states.size());
  b.actions.resize(count);
  b.rewards.resize(count);
  b.done.resize(count);
  for (int i = 0; i < count; ++i) {
    std::uniform_int_distribution<int> pick(i, size_ - 1);
    std::swap(scratch_[i], scratch_[pick(rng)]);
    const int slot = scratch_[i];
    const std::size_t src = static_cast<std::size_t>(slot) * dim_;
    const std::size_t dst = static_cast<std::size_t>(i) * dim_;
    std::copy_n(states_.begin() + src, dim_, b.states.begin() + dst);
    std::copy_n(next_states_.begin() + src, dim_, b.next_states.begin() + dst);
    b.actions[i] = actions_[slot];
    b.rewards[i] = rewards_[slot];
    b.done[i] = done_[slot];
  }
  return b;
}

// ---------------------------------------------------------------- policy

int greedy_action(std::span<const double> q) {
  if (q.empty()) throw ContractViolation("no actions to choose from");
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

int select_action(std::span<const double> q, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ContractViolation("epsilon outside [0, 1]");
  if (q.empty()) throw ContractViolation("no actions to choose from");
  if (uniform01(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(q.size()) - 1);
    return pick(rng);
  }
  return greedy_action(q);
}

std::vector<int> network_dims(const SimConfig& config) {
  const CacheBudgets budgets = budgets_from(config);
  const int cf = config.num_contents();
  std::vector<int> dims{2 * config.num_cvs * cf + 2 * cf};
  dims.insert(dims.end(), config.hidden_layers.begin(), config.hidden_layers.end());
  dims.push_back(static_cast<int>(ActionCodec(budgets).total()));
  return dims;
}

namespace {

double count_scale(const SimConfig& config) { return 1.0 / config.doi_slots; }

SlotCounts empty_counts(const SimConfig& config) {
  SlotCounts s;
  s.requests.assign(config.num_contents(), 0);
  s.hits.assign(config.num_contents(), 0);
  return s;
}

} // namespace

TrainResult train_cpp(const SimConfig& config, const Environment& env,
                      const TrainProgress& progress) {
  config.validate();
  const CacheBudgets budgets = budgets_from(config);
  const ActionCodec codec(budgets);
  const auto dims = network_dims(config);
  const int F = config.contents_per_class;

  Rng init_rng = substream(config.env_seed, "agent-init");
  QLearner learner(init_params(dims, init_rng), config.learning_rate);
  ReplayBuffer memory(config.replay_capacity, dims.front());
  Rng agent_rng = substream(config.env_seed, "agent");

  const double decay =
      (config.eps_start - config.eps_end) / (config.eps_decay_fraction * config.train_epochs);
  const int num_dois = config.num_dois();
  const double scale = count_scale(config);

  TrainResult result;
  for (int e = 0; e < config.train_epochs; ++e) {
    const double epsilon = std::max(config.eps_end, config.eps_start - e * decay);
    const RequestStream stream = episode_stream(config, env, config.env_seed, "train-requests", e);

    RequestHistory history(config.num_cvs, config.num_classes, F);
    CppState state = encode_state(history, env.library, budgets, true);
    std::vector<double> x = state.flatten(scale);
    double return_sum = 0.0;
    double loss_sum = 0.0;
    int updates = 0;
    int t = 0;
    for (int n = 0; n < num_dois; ++n) {
      const auto q = q_forward(learner.online(), x);
      const int action = select_action(q, epsilon, agent_rng);
      const CacheState cache = codec.decode(action);

      history.clear();
      const int end = std::min(config.episode_slots, (n + 1) * config.doi_slots);
      std::vector<SlotCounts> slots;
      for (; t < end; ++t) {
        SlotCounts counts = empty_counts(config);
        for (const auto& r : stream[t]) {
          const bool hit = cache.stored(r.content);
          history.record(r, hit, t);
          const int idx = r.content.cls * F + r.content.index;
          ++counts.requests[idx];
          if (hit) ++counts.hits[idx];
        }
        slots.push_back(std::move(counts));
      }
      const double reward =
          compute_reward(slots, state.top, config.delta_pop_sim, config.delta_hit);
      CppState next = encode_state(history, env.library, budgets, false);
      std::vector<double> x_next = next.flatten(scale);
      const bool done = n + 1 == num_dois;
      memory.push(x, action, reward, x_next, done);
      return_sum += reward;

      if (memory.size() >= config.batch_size) {
        loss_sum += learner.train_step(memory.sample(config.batch_size, agent_rng), config.gamma);
        ++updates;
        // Counted in updates: at one update per DoI a slot-based interval leaves
        // the target a few steps behind the online net and Q runs away.
        if (learner.steps() % config.target_sync_steps == 0) learner.sync_target();
      }
      state = std::move(next);
      x = std::move(x_next);
    }
    CurveRow row{e, epsilon, return_sum / num_dois,
                 updates ? loss_sum / updates : std::numeric_limits<double>::quiet_NaN()};
    result.curve.push_back(row);
    if (progress) progress(row);
  }
  result.params = learner.online();
  result.train_steps = learner.steps();
  return result;
}

void write_training_curve(const std::string& path, const std::vector<CurveRow>& curve,
                          const std::string& fingerprint) {
  CsvWriter w(path, fingerprint, {"epoch", "epsilon", "mean_return", "loss"});
  for (const auto& r : curve) {
    w.field(r.epoch).field(r.epsilon).field(r.mean_return);
    if (std::isnan(r.loss)) {
      w.field(std::string_view{});
    } else {
      w.field(r.loss);
    }
    w.end_row();
  }
}

CppPolicy::CppPolicy(QNetworkParams params, const SimConfig& config)
    : params_(std::move(params)), budgets_(budgets_from(config)), codec_(budgets_),
      count_scale_(count_scale(config)) {
  params_.check();
  if (params_.output_dim() != codec_.total()) {
    throw ConfigError("model output size does not match the placement action count");
  }
}

CacheState CppPolicy::place(const RequestHistory& history, const ContentLibrary& lib,
                            bool cold) const {
  const CppState s = encode_state(history, lib, budgets_, cold);
  return codec_.decode(greedy_action(q_forward(params_, s.flatten(count_scale_))));
}

namespace {

nlohmann::json model_key(const SimConfig& config) {
  const CacheBudgets b = budgets_from(config);
  return {{"num_cvs", config.num_cvs},
          {"num_classes", config.num_classes},
          {"contents_per_class", config.contents_per_class},
          {"per_class_units", b.per_class_units},
          {"total_units", b.total_units}};
}

} // namespace

void save_model(const std::string& path, const QNetworkParams& params, const SimConfig& config) {
  nlohmann::json j;
  j["fingerprint"] = model_key(config);
  j["config_fingerprint"] = config.fingerprint_hex();
  nlohmann::json net = params;
  for (auto it = net.begin(); it != net.end(); ++it) j[it.key()] = it.value();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file " + path);
  out << j.dump() << '\n';
}

QNetworkParams load_model(const std::string& path, const SimConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model file " + path + ": " + e.what());
  }
  const auto expected = model_key(config);
  if (!j.contains("fingerprint") || j["fingerprint"] != expected) {
    std::ostringstream msg;
    msg << "model " << path << " was trained for "
        << (j.contains("fingerprint") ? j["fingerprint"].dump() : std::string("unknown"))
        << " but the config needs " << expected.dump();
    throw ConfigError(msg.str());
  }
  QNetworkParams p;
  try {
    p = params_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed model file " + path + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ConfigError("malformed model file " + path + ": " + e.what());
  }
  if (p.input_dim() != network_dims(config).front()) {
    throw ConfigError("model input size does not match the state length");
  }
  return p;
}

} // namespace vecsim
