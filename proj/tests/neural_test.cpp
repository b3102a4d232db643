#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fastcar/error.hpp"
#include "fastcar/neural.hpp"
#include "support/gradcheck.hpp"

using namespace fastcar;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected fastcar::Error";
  return ErrorCode::InvalidArgument;
}

// Straightforward second implementation used as the forward-pass oracle.
std::vector<double> reference_forward(const Mlp& model, std::vector<double> x) {
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const auto layer = model.layer(l);
    std::vector<double> y(layer.out, 0.0);
    for (std::size_t r = 0; r < layer.out; ++r) {
      y[r] = layer.bias[r];
      for (std::size_t c = 0; c < layer.in; ++c) y[r] += layer.weights[r * layer.in + c] * x[c];
      if (l + 1 < model.layer_count() && y[r] < 0.0) y[r] = 0.0;
    }
    x = std::move(y);
  }
  return x;
}

std::vector<std::size_t> everything(const TrainingData& data) {
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

// Network whose output layer is zero, with all-zero targets: no residual.
std::pair<Mlp, TrainingData> zero_residual_problem() {
  Mlp model = Mlp::initialize({{3, 5, 1}}, 4);
  for (auto& w : model.layer_weights(1)) w = 0.0;
  for (auto& b : model.layer_bias(1)) b = 0.0;
  TrainingData data;
  for (int i = 0; i < 4; ++i) {
    data.features.push_back({0.5 * i, -1.0, 2.0 - i});
    data.targets.push_back({0, 0.0});
  }
  return {model, data};
}

}  // namespace

TEST(MlpSpec, Validation) {
  EXPECT_EQ(code_of([] { MlpSpec{{3, 1}}.validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { MlpSpec{{3, 0, 1}}.validate(); }), ErrorCode::InvalidArgument);
  EXPECT_NO_THROW((MlpSpec{{3, 4, 1}}.validate()));
}

TEST(Forward, ZeroModelOutputsZero) {
  const auto model = Mlp::zeros({{4, 3, 2}});
  const auto out = model.forward(std::vector<double>{1, -2, 3, 4});
  EXPECT_EQ(out, (std::vector<double>{0.0, 0.0}));
}

TEST(Forward, IdentityLayersPassPositiveInputs) {
  auto model = Mlp::zeros({{3, 3, 3}});
  for (std::size_t l = 0; l < 2; ++l) {
    auto w = model.layer_weights(l);
    for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  }
  const std::vector<double> x{0.5, 2.0, 7.0};
  EXPECT_EQ(model.forward(x), x);
}

TEST(Forward, MatchesIndependentImplementation) {
  const auto model = Mlp::initialize({{5, 7, 4, 2}}, 11);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> x(5);
    for (auto& v : x) v = n(rng);
    const auto got = model.forward(x);
    const auto want = reference_forward(model, x);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-12);
  }
  EXPECT_EQ(code_of([&] { model.forward(std::vector<double>{1.0}); }), ErrorCode::DimMismatch);
}

TEST(Mlp, HeUniformBoundsAndZeroBias) {
  const auto model = Mlp::initialize({{10, 20, 1}}, 3);
  const double limit = std::sqrt(6.0 / 10.0);
  for (const double w : model.layer(0).weights) EXPECT_LE(std::abs(w), limit);
  for (const double b : model.layer(0).bias) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(model, Mlp::initialize({{10, 20, 1}}, 3));
  EXPECT_FALSE(model == Mlp::initialize({{10, 20, 1}}, 4));
}

TEST(Mlp, CheckpointRoundTripIsExact) {
  const auto model = Mlp::initialize({{3, 8, 4}}, 21);
  const auto text = model.to_json().dump();
  EXPECT_EQ(Mlp::from_json(nlohmann::json::parse(text)), model);
  auto doc = model.to_json();
  doc["layers"][0]["weights"].erase(0);
  EXPECT_EQ(code_of([&] { Mlp::from_json(doc); }), ErrorCode::Parse);
}

TEST(Backward, SmallModelMatchesFiniteDifferences) {
  auto model = Mlp::initialize({{2, 16, 1}}, 5);
  for (auto& b : model.layer_bias(0)) b = 0.05;
  TrainingData data;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  for (int i = 0; i < 8; ++i) {
    data.features.push_back({v(rng), v(rng)});
    data.targets.push_back({0, v(rng)});
  }
  const auto r = support::finite_difference_check(model, data, LossSpec::mse(), 1e-4);
  EXPECT_EQ(r.failures, 0u) << r.first_failure;
}

TEST(Backward, RandomModelsMatchFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto p = support::random_problem(seed);
    const auto r = support::finite_difference_check(p.model, p.data, p.loss, p.weight_decay);
    ASSERT_EQ(r.failures, 0u) << "seed " << seed << ": " << r.first_failure;
  }
}

TEST(Backward, ZeroResidualGivesZeroGradient) {
  const auto [model, data] = zero_residual_problem();
  std::vector<double> grad;
  const auto parts = backward(model, data, everything(data), LossSpec::mse(), 0.0, grad);
  EXPECT_EQ(parts.data, 0.0);
  for (const double g : grad) EXPECT_EQ(g, 0.0);
}

TEST(Backward, WeightDecayTermIsLambdaTheta) {
  const auto [model, data] = zero_residual_problem();
  std::vector<double> grad;
  const double lambda = 0.25;
  const auto parts = backward(model, data, everything(data), LossSpec::mse(), lambda, grad);
  const auto params = model.params();
  double norm2 = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    EXPECT_EQ(grad[i], lambda * params[i]);
    norm2 += params[i] * params[i];
  }
  EXPECT_NEAR(parts.decay, 0.5 * lambda * norm2, 1e-12);
}

TEST(Loss, TwoHeadNeedsMatchingOutputs) {
  EXPECT_EQ(code_of([] { LossSpec::two_head(3).check_against({{2, 4, 3}}); }),
            ErrorCode::DimMismatch);
  EXPECT_NO_THROW(LossSpec::two_head(3).check_against({{2, 4, 4}}));
  EXPECT_EQ(code_of([] { LossSpec::mse().check_against({{2, 4, 2}}); }),
            ErrorCode::DimMismatch);
}

TEST(Loss, CrossEntropyOfUniformLogitsIsLogN) {
  const auto model = Mlp::zeros({{2, 3, 4}});
  TrainingData data{{{1.0, 2.0}}, {{2, 0.0}}};
  const auto parts = evaluate_loss(model, data, everything(data), LossSpec::two_head(3), 0.0);
  EXPECT_NEAR(parts.classification, std::log(3.0), 1e-12);
  EXPECT_EQ(parts.regression, 0.0);
}

TEST(Adam, ZeroGradientLeavesParametersAlone) {
  std::vector<double> params{1.0, -2.0, 3.5};
  const auto before = params;
  Adam adam(params.size(), 1e-3);
  const std::vector<double> zero(params.size(), 0.0);
  for (int i = 0; i < 10; ++i) adam.step(params, zero);
  EXPECT_EQ(params, before);
  EXPECT_EQ(adam.steps(), 10u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> params{1.0, 1.0};
  Adam adam(2, 0.01);
  adam.step(params, std::vector<double>{4.0, -0.5});
  EXPECT_NEAR(params[0], 0.99, 1e-9);
  EXPECT_NEAR(params[1], 1.01, 1e-9);
}

TEST(Scheduler, ReducesAfterPatienceNonImprovingEpochs) {
  PlateauScheduler s(1e-3, {0.1, 5, 1e-8});
  EXPECT_EQ(s.step(1.0), 1e-3);
  for (int epoch = 2; epoch <= 6; ++epoch) EXPECT_EQ(s.step(1.0), 1e-3) << epoch;
  EXPECT_DOUBLE_EQ(s.step(1.0), 1e-4);
  EXPECT_EQ(s.reductions(), 1u);
  for (int epoch = 8; epoch <= 12; ++epoch) EXPECT_DOUBLE_EQ(s.step(1.0), 1e-4);
  EXPECT_EQ(s.reductions(), 1u);
}

TEST(Scheduler, ImprovementResetsTheCounter) {
  PlateauScheduler s(1e-3, {0.1, 2, 1e-8});
  s.step(1.0);
  s.step(1.0);
  s.step(1.0);
  s.step(0.5);
  s.step(0.5);
  EXPECT_EQ(s.step(0.5 - 1e-9), 1e-3);  // within the threshold: not an improvement
  EXPECT_EQ(s.reductions(), 0u);
  EXPECT_DOUBLE_EQ(s.step(0.5), 1e-4);
  EXPECT_EQ(s.reductions(), 1u);
}

TEST(SchedulerProperty, NeverIncreasesAndCompounds) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> loss(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    PlateauScheduler s(1e-2, {0.5, 1 + static_cast<std::size_t>(trial % 4), 1e-8});
    double previous = s.learning_rate();
    for (int e = 0; e < 60; ++e) {
      const double lr = s.step(loss(rng));
      ASSERT_LE(lr, previous);
      previous = lr;
    }
    const double expected = 1e-2 * std::pow(0.5, static_cast<double>(s.reductions()));
    EXPECT_NEAR(s.learning_rate(), expected, 1e-15 * expected);
  }
}

TEST(Train, LearnsAScaledIdentity) {
  TrainingData data;
  for (int i = 0; i < 64; ++i) {
    const double x = -1.0 + 2.0 * i / 63.0;
    data.features.push_back({x});
    data.targets.push_back({0, 3.0 * x});
  }
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.weight_decay = 0.0;
  cfg.batch_size = 8;
  cfg.hidden_widths = {16};
  const auto result = train(Mlp::initialize({{1, 16, 1}}, 1), data, {}, LossSpec::mse(), cfg);
  ASSERT_EQ(result.trace.epochs.size(), 100u);
  const auto final_loss =
      evaluate_loss(result.model, data, everything(data), LossSpec::mse(), 0.0).data;
  EXPECT_LT(final_loss, 1e-3);
  for (std::size_t e = 1; e < result.trace.epochs.size(); ++e) {
    EXPECT_LE(result.trace.epochs[e].learning_rate, result.trace.epochs[e - 1].learning_rate);
  }
}

TEST(Train, SameSeedSameParameters) {
  const auto p = support::random_problem(3);
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.batch_size = 3;
  const auto a = train(p.model, p.data, p.data, p.loss, cfg);
  const auto b = train(p.model, p.data, p.data, p.loss, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.trace.to_json(), b.trace.to_json());
  cfg.seed = 8;
  EXPECT_FALSE(train(p.model, p.data, p.data, p.loss, cfg).model == a.model);
}

TEST(Train, NonFiniteLossAbortsWithTrace) {
  TrainingData data{{{1.0}, {2.0}}, {{0, 1e300}, {0, -1e300}}};
  TrainConfig cfg;
  cfg.max_epochs = 3;
  try {
    train(Mlp::initialize({{1, 2, 1}}, 1), data, {}, LossSpec::mse(), cfg);
    FAIL() << "expected TrainingAborted";
  } catch (const TrainingAborted& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
    EXPECT_TRUE(e.trace().epochs.empty());
  }
}

TEST(Guideline, FastDropAndGradientGrowthPass) {
  TrainTrace trace;
  const double val[] = {10, 7, 4.5, 4, 3.5, 3};
  const double grad[] = {1.0, 1.3, 1.6, 1.9, 2.1, 2.0};
  for (std::size_t i = 0; i < 6; ++i) trace.epochs.push_back({i + 1, val[i], val[i], grad[i], 1e-3});
  const auto v = guideline_check(trace);
  EXPECT_TRUE(v.loss_condition);
  EXPECT_TRUE(v.gradient_condition);
  EXPECT_TRUE(v.passed());
  EXPECT_DOUBLE_EQ(v.min_loss_ratio, 0.3);
  EXPECT_DOUBLE_EQ(v.max_gradient_ratio, 2.1);
}

TEST(Guideline, LossAtEpochTwoCountsAndSlowGradientsFail) {
  TrainTrace trace;
  const double val[] = {10, 4, 3};
  const double grad[] = {1.0, 1.1, 1.9};
  for (std::size_t i = 0; i < 3; ++i) trace.epochs.push_back({i + 1, val[i], val[i], grad[i], 1e-3});
  const auto v = guideline_check(trace);
  EXPECT_TRUE(v.loss_condition);
  EXPECT_FALSE(v.gradient_condition);
  EXPECT_FALSE(v.passed());
}

TEST(Guideline, FlatTraceFailsAndShortTraceThrows) {
  TrainTrace trace;
  for (std::size_t i = 0; i < 30; ++i) trace.epochs.push_back({i + 1, 1.0, 1.0, 1.0, 1e-3});
  EXPECT_FALSE(guideline_check(trace).passed());
  EXPECT_EQ(guideline_check(trace).epochs_checked, 20u);
  trace.epochs.resize(1);
  EXPECT_EQ(code_of([&] { guideline_check(trace); }), ErrorCode::InsufficientEpochs);
}

TEST(Guideline, OnlyTheFirstTwentyEpochsCount) {
  TrainTrace trace;
  for (std::size_t i = 0; i < 25; ++i) {
    const double g = i == 22 ? 5.0 : 1.0;
    trace.epochs.push_back({i + 1, i == 22 ? 0.1 : 1.0, 1.0, g, 1e-3});
  }
  for (auto& e : trace.epochs) e.val_loss = e.epoch == 23 ? 0.1 : 1.0;
  EXPECT_FALSE(guideline_check(trace).passed());
}
