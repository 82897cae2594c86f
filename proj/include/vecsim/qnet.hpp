#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vecsim/rng.hpp"

namespace vecsim {

// Dense network with rectifier hidden layers and a linear output layer.
// weights[l] is an in x out row-major array (input-major), so a forward pass
// is y = x W + b.
struct QNetworkParams {
  std::vector<int> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  std::size_t parameter_count() const;

  // ContractViolation on shape mismatch or non-finite entries.
  void check() const;

  friend bool operator==(const QNetworkParams&, const QNetworkParams&) = default;
};

// He-uniform weights, zero biases.
QNetworkParams init_params(const std::vector<int>& layer_dims, Rng& rng);
QNetworkParams zero_params(const std::vector<int>& layer_dims);

// DomainError when the state length differs from the input dimension.
std::vector<double> q_forward(const QNetworkParams& params, std::span<const double> state);

// Forward pass over `rows` states stored row-major; returns rows x outputs.
std::vector<double> q_forward_batch(const QNetworkParams& params, std::span<const double> states,
                                    int rows);

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

// A training batch in structure-of-arrays form.
struct Batch {
  int size = 0;
  std::vector<double> states;      // size x input
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> next_states; // size x input
  std::vector<std::uint8_t> done;
};

Batch make_batch(std::span<const Transition> transitions);

// Mean squared error of the taken actions' Q-values against
// r + gamma * max_a' Q(x', a'; target) (r alone when done), and its gradient
// with respect to `params`. Gradients are laid out like the parameters.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

class QLearner {
public:
  QLearner() = default;
  QLearner(QNetworkParams online, double learning_rate, double beta1 = 0.9,
           double beta2 = 0.999, double epsilon = 1e-8);

  const QNetworkParams& online() const { return online_; }
  const QNetworkParams& target() const { return target_; }
  void set_target(const QNetworkParams& p) { target_ = p; }
  void sync_target() { target_ = online_; }
  long steps() const { return steps_; }

  // Loss and gradient without touching the parameters.
  double loss_and_gradient(const Batch& batch, double gamma, Gradients& grads);

  // One Adam step; returns the pre-update loss. TrainingError when the loss
  // is not finite.
  double train_step(const Batch& batch, double gamma);

private:
  void ensure_workspace(int rows);
  void forward(const QNetworkParams& p, const double* x, int rows,
               std::vector<std::vector<double>>& acts);

  QNetworkParams online_;
  QNetworkParams target_;
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long steps_ = 0;
  Gradients m_, v_, g_;

  int rows_ = 0;
  std::vector<std::vector<double>> acts_;        // online activations per layer
  std::vector<std::vector<double>> target_acts_; // target activations per layer
  std::vector<std::vector<double>> deltas_;
  std::vector<double> wt_;                       // transposed weights scratch
};

// Loss alone, used by finite-difference checks.
double q_loss(const QNetworkParams& params, const QNetworkParams& target, const Batch& batch,
              double gamma);

void to_json(nlohmann::json& j, const QNetworkParams& p);
QNetworkParams params_from_json(const nlohmann::json& j);

} // namespace vecsim
