#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fastcar/neural.hpp"

namespace fastcar::support {

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_relative = 0.0;
  std::string first_failure;
};

// Central differences on the full objective, compared per parameter. Passes
// when the relative error is under `rel_tol` or the absolute one under
// `abs_tol`.
inline GradCheckResult finite_difference_check(Mlp model, const TrainingData& data,
                                               const LossSpec& loss,
                                               double weight_decay,
                                               double h = 1e-5,
                                               double rel_tol = 1e-4,
                                               double abs_tol = 1e-7) {
  std::vector<std::size_t> batch(data.size());
  std::iota(batch.begin(), batch.end(), std::size_t{0});
  std::vector<double> analytic;
  backward(model, data, batch, loss, weight_decay, analytic);

  GradCheckResult result;
  auto params = model.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = evaluate_loss(model, data, batch, loss, weight_decay).objective();
    params[i] = saved - h;
    const double down = evaluate_loss(model, data, batch, loss, weight_decay).objective();
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double diff = std::abs(numeric - analytic[i]);
    const double scale = std::max(std::abs(numeric), std::abs(analytic[i]));
    const double rel = scale > 0.0 ? diff / scale : 0.0;
    ++result.checked;
    if (scale > abs_tol) result.worst_relative = std::max(result.worst_relative, rel);
    if (rel > rel_tol && diff > abs_tol) {
      if (result.failures++ == 0) {
        result.first_failure = "param " + std::to_string(i) + ": analytic " +
                               std::to_string(analytic[i]) + " numeric " +
                               std::to_string(numeric);
      }
    }
  }
  return result;
}

// A random 1-3 hidden layer network with widths up to 6 and matching data.
struct RandomProblem {
  Mlp model;
  TrainingData data;
  LossSpec loss;
  double weight_decay;
};

inline RandomProblem random_problem(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> width(1, 6);
  std::uniform_int_distribution<std::size_t> depth(1, 3);
  std::uniform_int_distribution<std::size_t> classes(2, 4);
  std::uniform_real_distribution<double> value(-2.0, 2.0);
  std::uniform_real_distribution<double> decay(0.0, 0.1);
  std::bernoulli_distribution two_head(0.5);

  MlpSpec spec;
  spec.layer_widths.push_back(width(rng));
  const std::size_t hidden = depth(rng);
  for (std::size_t i = 0; i < hidden; ++i) spec.layer_widths.push_back(width(rng) + 1);
  LossSpec loss = LossSpec::mse();
  if (two_head(rng)) {
    const std::size_t n = classes(rng);
    loss = LossSpec::two_head(n, 1.0, 0.5 + decay(rng) * 10.0);
    spec.layer_widths.push_back(n + 1);
  } else {
    spec.layer_widths.push_back(1);
  }
  Mlp model = Mlp::initialize(spec, seed + 1000);
  // Nonzero biases so ReLU kinks are not lined up at the origin.
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    for (auto& b : model.layer_bias(l)) b = 0.1 * value(rng);
  }

  TrainingData data;
  std::uniform_int_distribution<int> cls(1, static_cast<int>(std::max<std::size_t>(1, loss.n_classes)));
  for (int k = 0; k < 8; ++k) {
    std::vector<double> x(spec.input_dim());
    for (auto& v : x) v = value(rng);
    data.features.push_back(std::move(x));
    data.targets.push_back({cls(rng), value(rng)});
  }
  return {std::move(model), std::move(data), loss, decay(rng)};
}

}  // namespace fastcar::support
