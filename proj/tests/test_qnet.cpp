#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "vecsim/errors.hpp"
#include "vecsim/qnet.hpp"

using namespace vecsim;

namespace {

// Independent forward pass: per-output dot products, no kernels.
std::vector<double> naive_forward(const QNetworkParams& p, std::vector<double> x) {
  for (int l = 0; l < p.num_layers(); ++l) {
    const int in = p.layer_dims[l], out = p.layer_dims[l + 1];
    std::vector<double> y(out);
    for (int j = 0; j < out; ++j) {
      long double s = p.biases[l][j];
      for (int i = 0; i < in; ++i) s += static_cast<long double>(x[i]) * p.weights[l][i * out + j];
      y[j] = static_cast<double>(s);
      if (l + 1 < p.num_layers()) y[j] = std::max(0.0, y[j]);
    }
    x = std::move(y);
  }
  return x;
}

std::vector<double> random_vec(Rng& rng, int n) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng);
  return v;
}

Batch single(const std::vector<double>& s, int a, double r, const std::vector<double>& s2,
             bool done) {
  const std::vector<Transition> t{{s, a, r, s2, done}};
  return make_batch(t);
}

} // namespace

TEST_CASE("zero and identity networks") {
  const auto z = zero_params({4, 8, 3});
  const std::vector<double> x{1, 2, 3, 4};
  for (double q : q_forward(z, x)) CHECK(q == 0.0);

  auto id = zero_params({3, 3});
  for (int i = 0; i < 3; ++i) id.weights[0][i * 3 + i] = 1.0;
  const std::vector<double> v{0.5, -2.0, 7.0};
  CHECK(q_forward(id, v) == v);
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(q_forward(id, wrong), DomainError);
}

TEST_CASE("forward pass agrees with an independent implementation") {
  Rng rng(17);
  const auto p = init_params({330, 64, 32, 10}, rng);
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = random_vec(rng, 330);
    const auto a = q_forward(p, x);
    const auto b = naive_forward(p, x);
    for (int j = 0; j < 10; ++j) CHECK(std::abs(a[j] - b[j]) <= 1e-12);
  }
  // Batched and single-row passes agree.
  std::vector<double> rows;
  for (int r = 0; r < 3; ++r) {
    const auto x = random_vec(rng, 330);
    rows.insert(rows.end(), x.begin(), x.end());
  }
  const auto batch = q_forward_batch(p, rows, 3);
  for (int r = 0; r < 3; ++r) {
    const auto one = q_forward(p, std::span<const double>(rows).subspan(r * 330, 330));
    for (int j = 0; j < 10; ++j) CHECK(batch[r * 10 + j] == doctest::Approx(one[j]).epsilon(1e-13));
  }
}

TEST_CASE("fixed point leaves parameters unchanged") {
  Rng rng(2);
  auto p = init_params({4, 6, 3}, rng);
  const auto x = random_vec(rng, 4);
  const double q = q_forward(p, x)[1];
  QLearner learner(p, 1e-3);
  const double loss = learner.train_step(single(x, 1, q, x, true), 0.9);
  CHECK(loss == 0.0);
  CHECK(learner.online() == p);
}

TEST_CASE("gamma zero targets the reward") {
  Rng rng(3);
  const auto p = init_params({4, 6, 3}, rng);
  const auto x = random_vec(rng, 4);
  const auto x2 = random_vec(rng, 4);
  const double q = q_forward(p, x)[2];
  const auto b = single(x, 2, 1.25, x2, false);
  CHECK(q_loss(p, p, b, 0.0) == doctest::Approx((q - 1.25) * (q - 1.25)).epsilon(1e-12));
  // With gamma > 0 the target network's maximum enters.
  const auto qn = q_forward(p, x2);
  const double target = 1.25 + 0.5 * *std::max_element(qn.begin(), qn.end());
  CHECK(q_loss(p, p, b, 0.5) == doctest::Approx((q - target) * (q - target)).epsilon(1e-12));
}

TEST_CASE("analytic gradient against central differences") {
  Rng rng(13);
  const auto p = init_params({330, 16, 10}, rng);
  const auto target = init_params({330, 16, 10}, rng);
  std::vector<Transition> ts;
  for (int i = 0; i < 8; ++i) {
    ts.push_back({random_vec(rng, 330), static_cast<int>(rng() % 10), uniform01(rng),
                  random_vec(rng, 330), i % 3 == 0});
  }
  const Batch b = make_batch(ts);
  QLearner learner(p, 1e-3);
  learner.set_target(target);
  Gradients g;
  learner.loss_and_gradient(b, 0.9, g);
  double worst = 0.0;
  const double h = 1e-5;
  for (int l = 0; l < p.num_layers(); ++l) {
    for (std::size_t i = 0; i < p.weights[l].size(); i += 37) {
      auto plus = p, minus = p;
      plus.weights[l][i] += h;
      minus.weights[l][i] -= h;
      const double num = (q_loss(plus, target, b, 0.9) - q_loss(minus, target, b, 0.9)) / (2 * h);
      const double a = g.weights[l][i];
      worst = std::max(worst, std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-7}));
    }
    for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
      auto plus = p, minus = p;
      plus.biases[l][i] += h;
      minus.biases[l][i] -= h;
      const double num = (q_loss(plus, target, b, 0.9) - q_loss(minus, target, b, 0.9)) / (2 * h);
      const double a = g.biases[l][i];
      worst = std::max(worst, std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-7}));
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("training lowers the loss on a fixed batch") {
  Rng rng(4);
  const auto p = init_params({6, 16, 4}, rng);
  std::vector<Transition> ts;
  for (int i = 0; i < 16; ++i) {
    ts.push_back({random_vec(rng, 6), static_cast<int>(rng() % 4), uniform01(rng), {}, true});
    ts.back().next_state = ts.back().state;
  }
  const Batch b = make_batch(ts);
  QLearner learner(p, 1e-2);
  const double first = learner.train_step(b, 0.0);
  for (int i = 0; i < 200; ++i) learner.train_step(b, 0.0);
  CHECK(q_loss(learner.online(), learner.target(), b, 0.0) < 0.1 * first);
  CHECK(learner.steps() == 201);
}

TEST_CASE("non-finite loss raises a training error") {
  Rng rng(5);
  const auto p = init_params({3, 4, 2}, rng);
  QLearner learner(p, 1e-3);
  const std::vector<double> x{1, 1, 1};
  const auto b = single(x, 0, std::numeric_limits<double>::infinity(), x, true);
  CHECK_THROWS_AS(learner.train_step(b, 0.5), TrainingError);
}

TEST_CASE("parameter checks and JSON round trip") {
  Rng rng(6);
  auto p = init_params({5, 7, 3}, rng);
  CHECK(p.parameter_count() == 5 * 7 + 7 + 7 * 3 + 3);
  nlohmann::json j = p;
  const auto back = params_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == p);
  p.biases[1][0] = std::nan("");
  CHECK_THROWS_AS(p.check(), ContractViolation);
  auto bad = init_params({5, 7, 3}, rng);
  bad.weights[0].pop_back();
  CHECK_THROWS_AS(bad.check(), ContractViolation);
}
