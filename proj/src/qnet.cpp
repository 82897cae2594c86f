#include "vecsim/qnet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vecsim/errors.hpp"
#include "vecsim/kernels.hpp"

namespace vecsim {

namespace k = kernels;

std::size_t QNetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

void QNetworkParams::check() const {
  if (layer_dims.size() < 2) throw ContractViolation("network needs at least one layer");
  if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size()) {
    throw ContractViolation("layer count does not match layer_dims");
  }
  for (int l = 0; l < num_layers(); ++l) {
    if (layer_dims[l] < 1 || layer_dims[l + 1] < 1) throw ContractViolation("empty layer");
    if (weights[l].size() != static_cast<std::size_t>(layer_dims[l]) * layer_dims[l + 1] ||
        biases[l].size() != static_cast<std::size_t>(layer_dims[l + 1])) {
      throw ContractViolation("layer " + std::to_string(l) + " shape mismatch");
    }
    for (double w : weights[l]) {
      if (!std::isfinite(w)) throw ContractViolation("non-finite weight");
    }
    for (double b : biases[l]) {
      if (!std::isfinite(b)) throw ContractViolation("non-finite bias");
    }
  }
}

QNetworkParams zero_params(const std::vector<int>& layer_dims) {
  QNetworkParams p;
  p.layer_dims = layer_dims;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
    p.weights.emplace_back(static_cast<std::size_t>(layer_dims[l]) * layer_dims[l + 1], 0.0);
    p.biases.emplace_back(layer_dims[l + 1], 0.0);
  }
  p.check();
  return p;
}

QNetworkParams init_params(const std::vector<int>& layer_dims, Rng& rng) {
  QNetworkParams p = zero_params(layer_dims);
  for (int l = 0; l < p.num_layers(); ++l) {
    const double limit = std::sqrt(6.0 / layer_dims[l]);
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : p.weights[l]) w = dist(rng);
  }
  return p;
}

namespace {

void forward_layers(const QNetworkParams& p, const double* x, int rows,
                    std::vector<std::vector<double>>& acts) {
  acts.resize(p.num_layers());
  const double* in = x;
  for (int l = 0; l < p.num_layers(); ++l) {
    const int din = p.layer_dims[l];
    const int dout = p.layer_dims[l + 1];
    auto& y = acts[l];
    y.resize(static_cast<std::size_t>(rows) * dout);
    k::broadcast_rows(p.biases[l].data(), y.data(), rows, dout);
    k::gemm_nn(in, p.weights[l].data(), y.data(), rows, din, dout);
    if (l + 1 < p.num_layers()) k::relu_inplace(y.data(), y.size());
    in = y.data();
  }
}

} // namespace

std::vector<double> q_forward_batch(const QNetworkParams& params, std::span<const double> states,
                                    int rows) {
  if (rows < 0 || states.size() != static_cast<std::size_t>(rows) * params.input_dim()) {
    throw DomainError("state length " + std::to_string(states.size()) +
                      " does not match network input " + std::to_string(params.input_dim()));
  }
  std::vector<std::vector<double>> acts;
  if (rows == 0) return {};
  forward_layers(params, states.data(), rows, acts);
  return std::move(acts.back());
}

std::vector<double> q_forward(const QNetworkParams& params, std::span<const double> state) {
  return q_forward_batch(params, state, 1);
}

Batch make_batch(std::span<const Transition> transitions) {
  Batch b;
  b.size = static_cast<int>(transitions.size());
  for (const auto& t : transitions) {
    b.states.insert(b.states.end(), t.state.begin(), t.state.end());
    b.next_states.insert(b.next_states.end(), t.next_state.begin(), t.next_state.end());
    b.actions.push_back(t.action);
    b.rewards.push_back(t.reward);
    b.done.push_back(t.done ? 1 : 0);
  }
  return b;
}

QLearner::QLearner(QNetworkParams online, double learning_rate, double beta1, double beta2,
                   double epsilon)
    : online_(std::move(online)), lr_(learning_rate), beta1_(beta1), beta2_(beta2),
      eps_(epsilon) {
  online_.check();
  target_ = online_;
  for (int l = 0; l < online_.num_layers(); ++l) {
    for (Gradients* g : {&m_, &v_, &g_}) {
      g->weights.emplace_back(online_.weights[l].size(), 0.0);
      g->biases.emplace_back(online_.biases[l].size(), 0.0);
    }
  }
}

void QLearner::forward(const QNetworkParams& p, const double* x, int rows,
                       std::vector<std::vector<double>>& acts) {
  forward_layers(p, x, rows, acts);
}

void QLearner::ensure_workspace(int rows) {
  if (rows == rows_) return;
  rows_ = rows;
  deltas_.assign(online_.num_layers(), {});
  for (int l = 0; l + 1 < online_.num_layers(); ++l) {
    deltas_[l].resize(static_cast<std::size_t>(rows) * online_.layer_dims[l + 1]);
  }
}

double QLearner::loss_and_gradient(const Batch& batch, double gamma, Gradients& grads) {
  const int n = batch.size;
  const int din = online_.input_dim();
  const int dout = online_.output_dim();
  const int L = online_.num_layers();
  if (n < 1) throw ContractViolation("empty training batch");
  if (batch.states.size() != static_cast<std::size_t>(n) * din ||
      batch.next_states.size() != batch.states.size()) {
    throw DomainError("batch state length does not match network input");
  }
  if (gamma < 0.0 || gamma > 1.0) throw ContractViolation("discount outside [0, 1]");
  ensure_workspace(n);

  std::vector<double> targets(n);
  forward(target_, batch.next_states.data(), n, target_acts_);
  const auto& qt = target_acts_.back();
  for (int i = 0; i < n; ++i) {
    targets[i] = batch.rewards[i];
    if (!batch.done[i] && gamma > 0.0) {
      const double* row = &qt[static_cast<std::size_t>(i) * dout];
      targets[i] += gamma * *std::max_element(row, row + dout);
    }
  }

  forward(online_, batch.states.data(), n, acts_);
  const auto& q = acts_.back();
  std::vector<double> g(n);
  double loss = 0.0;
  for (int i = 0; i < n; ++i) {
    const int a = batch.actions[i];
    if (a < 0 || a >= dout) throw DomainError("action index outside the output layer");
    const double diff = q[static_cast<std::size_t>(i) * dout + a] - targets[i];
    loss += diff * diff;
    g[i] = 2.0 * diff / n;
  }
  loss /= n;

  if (grads.weights.size() != static_cast<std::size_t>(L)) {
    grads.weights.assign(L, {});
    grads.biases.assign(L, {});
  }
  for (int l = 0; l < L; ++l) {
    grads.weights[l].assign(online_.weights[l].size(), 0.0);
    grads.biases[l].assign(online_.biases[l].size(), 0.0);
  }

  // Output layer: only the taken action's column carries gradient.
  {
    const int l = L - 1;
    const int hin = online_.layer_dims[l];
    const double* h = l == 0 ? batch.states.data() : acts_[l - 1].data();
    auto& gw = grads.weights[l];
    const auto& w = online_.weights[l];
    for (int i = 0; i < n; ++i) {
      const int a = batch.actions[i];
      const double* hi = h + static_cast<std::size_t>(i) * hin;
      for (int p = 0; p < hin; ++p) gw[static_cast<std::size_t>(p) * dout + a] += hi[p] * g[i];
      grads.biases[l][a] += g[i];
      if (l > 0) {
        double* d = &deltas_[l - 1][static_cast<std::size_t>(i) * hin];
        for (int p = 0; p < hin; ++p) d[p] = g[i] * w[static_cast<std::size_t>(p) * dout + a];
      }
    }
    if (l > 0) k::relu_mask(acts_[l - 1].data(), deltas_[l - 1].data(), deltas_[l - 1].size());
  }

  for (int l = L - 2; l >= 0; --l) {
    const int hin = online_.layer_dims[l];
    const int hout = online_.layer_dims[l + 1];
    const double* h = l == 0 ? batch.states.data() : acts_[l - 1].data();
    const double* d = deltas_[l].data();
    k::gemm_tn(h, d, grads.weights[l].data(), n, hin, hout);
    k::column_sums(d, grads.biases[l].data(), n, hout);
    if (l > 0) {
      wt_.resize(static_cast<std::size_t>(hin) * hout);
      k::transpose(online_.weights[l].data(), wt_.data(), hin, hout);
      std::fill(deltas_[l - 1].begin(), deltas_[l - 1].end(), 0.0);
      k::gemm_nn(d, wt_.data(), deltas_[l - 1].data(), n, hout, hin);
      k::relu_mask(acts_[l - 1].data(), deltas_[l - 1].data(), deltas_[l - 1].size());
    }
  }
  return loss;
}

double QLearner::train_step(const Batch& batch, double gamma) {
  const double loss = loss_and_gradient(batch, gamma, g_);
  if (!std::isfinite(loss)) {
    double max_q = 0.0;
    for (double x : acts_.back()) max_q = std::max(max_q, std::abs(x));
    std::ostringstream msg;
    msg << "non-finite loss " << loss << " at step " << steps_ + 1 << " (batch " << batch.size
        << ", max |Q| " << max_q << ")";
    throw TrainingError(msg.str());
  }
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  auto update = [&](std::vector<double>& theta, const std::vector<double>& grad,
                    std::vector<double>& m, std::vector<double>& v) {
    const std::size_t count = theta.size();
#pragma omp simd
    for (std::size_t i = 0; i < count; ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
      theta[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  };
  for (int l = 0; l < online_.num_layers(); ++l) {
    update(online_.weights[l], g_.weights[l], m_.weights[l], v_.weights[l]);
    update(online_.biases[l], g_.biases[l], m_.biases[l], v_.biases[l]);
  }
  return loss;
}

double q_loss(const QNetworkParams& params, const QNetworkParams& target, const Batch& batch,
              double gamma) {
  QLearner learner(params, 0.0);
  learner.set_target(target);
  Gradients g;
  return learner.loss_and_gradient(batch, gamma, g);
}

void to_json(nlohmann::json& j, const QNetworkParams& p) {
  j = nlohmann::json{{"layer_dims", p.layer_dims}, {"weights", p.weights}, {"biases", p.biases}};
}

QNetworkParams params_from_json(const nlohmann::json& j) {
  QNetworkParams p;
  j.at("layer_dims").get_to(p.layer_dims);
  j.at("weights").get_to(p.weights);
  j.at("biases").get_to(p.biases);
  p.check();
  return p;
}

} // namespace vecsim
