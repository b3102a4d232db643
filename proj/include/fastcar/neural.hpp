#pragma once

// Small dense ReLU networks trained with Adam and a reduce-on-plateau
// schedule. Everything runs on one thread and is bit-reproducible for a seed.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastcar/error.hpp"

namespace fastcar {

struct MlpSpec {
  // Input dimension, hidden widths..., output width.
  std::vector<std::size_t> layer_widths;

  std::size_t input_dim() const { return layer_widths.front(); }
  std::size_t output_dim() const { return layer_widths.back(); }
  // Requires at least one hidden layer and no zero widths.
  void validate() const;
};

struct LayerView {
  std::size_t in = 0;
  std::size_t out = 0;
  std::span<const double> weights;  // out x in, row-major
  std::span<const double> bias;
};

// Parameters are stored in one flat buffer, layer by layer, weights before
// bias, so optimizers and gradient checks can treat them uniformly.
class Mlp {
 public:
  // He-uniform weights, zero bias.
  static Mlp initialize(const MlpSpec& spec, std::uint64_t seed);
  static Mlp zeros(const MlpSpec& spec);

  const MlpSpec& spec() const noexcept { return spec_; }
  std::size_t layer_count() const noexcept { return offsets_.size(); }
  LayerView layer(std::size_t i) const;
  std::span<double> layer_weights(std::size_t i);
  std::span<double> layer_bias(std::size_t i);
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  // Affine-ReLU stack with an affine output layer. Throws DimMismatch.
  std::vector<double> forward(std::span<const double> input) const;

  nlohmann::json to_json() const;
  static Mlp from_json(const nlohmann::json& doc);

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.spec_.layer_widths == b.spec_.layer_widths &&
           a.params_ == b.params_;
  }

 private:
  explicit Mlp(MlpSpec spec);

  MlpSpec spec_;
  std::vector<double> params_;
  std::vector<std::size_t> offsets_;  // start of each layer's weights
};

struct Target {
  int class_index = 0;  // used by the classification head only
  double value = 0.0;   // regression target
};

struct TrainingData {
  std::vector<std::vector<double>> features;
  std::vector<Target> targets;

  std::size_t size() const noexcept { return features.size(); }
};

enum class LossKind {
  // Squared error of the single output against Target::value.
  Mse,
  // Outputs [0, n) are class logits scored with cross-entropy, output n is a
  // regression head scored with squared error.
  TwoHead,
};

struct LossSpec {
  LossKind kind = LossKind::Mse;
  std::size_t n_classes = 0;
  double class_weight = 1.0;
  double regression_weight = 1.0;

  static LossSpec mse() { return {}; }
  static LossSpec two_head(std::size_t n_classes, double class_weight = 1.0,
                           double regression_weight = 1.0) {
    return {LossKind::TwoHead, n_classes, class_weight, regression_weight};
  }
  void check_against(const MlpSpec& spec) const;
};

struct LossBreakdown {
  double data = 0.0;            // weighted sum of the parts below
  double classification = 0.0;  // mean cross-entropy (TwoHead)
  double regression = 0.0;      // mean squared error
  double decay = 0.0;           // 0.5 * lambda * ||theta||^2
  double objective() const noexcept { return data + decay; }
};

// Objective = mean data loss over `batch` + 0.5 * weight_decay * ||theta||^2.
LossBreakdown evaluate_loss(const Mlp& model, const TrainingData& data,
                            std::span<const std::size_t> batch,
                            const LossSpec& loss, double weight_decay);

// Writes d(objective)/d(theta) into `grad` (resized to param_count()) and
// returns the loss parts for the same batch.
LossBreakdown backward(const Mlp& model, const TrainingData& data,
                       std::span<const std::size_t> batch,
                       const LossSpec& loss, double weight_decay,
                       std::vector<double>& grad);

class Adam {
 public:
  Adam(std::size_t n_params, double learning_rate, double beta1 = 0.9,
       double beta2 = 0.999, double epsilon = 1e-8);

  // One bias-corrected update. `grad` already includes any decay term.
  void step(std::span<double> params, std::span<const double> grad);

  double learning_rate() const noexcept { return lr_; }
  void set_learning_rate(double lr) noexcept { lr_ = lr; }
  std::uint64_t steps() const noexcept { return t_; }

 private:
  double lr_;
  double beta1_;
  double beta2_;
  double epsilon_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

struct PlateauConfig {
  double factor = 0.1;
  std::size_t patience = 5;
  // A loss counts as an improvement only if it beats the best by this much.
  double threshold = 1e-8;
};

class PlateauScheduler {
 public:
  PlateauScheduler(double initial_lr, PlateauConfig config);

  // Feed one epoch's validation loss; returns the learning rate for the next
  // epoch. The rate drops once more than `patience` consecutive epochs fail
  // to improve.
  double step(double val_loss);

  double learning_rate() const noexcept { return lr_; }
  std::size_t reductions() const noexcept { return reductions_; }

 private:
  double lr_;
  PlateauConfig config_;
  double best_;
  std::size_t bad_epochs_ = 0;
  std::size_t reductions_ = 0;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  PlateauConfig scheduler;
  std::size_t max_epochs = 100;
  std::size_t batch_size = 16;
  std::uint64_t seed = 7;
  std::vector<std::size_t> hidden_widths{64, 64};

  void validate() const;
  nlohmann::json to_json() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  // Mean |g| over every trainable parameter at the epoch's last batch.
  double mean_abs_gradient = 0.0;
  double learning_rate = 0.0;  // rate in effect during the epoch
};

struct TrainTrace {
  std::vector<EpochStats> epochs;

  nlohmann::json to_json() const;
};

// Thrown when a loss turns NaN/inf; carries the epochs completed so far.
class TrainingAborted : public Error {
 public:
  TrainingAborted(const std::string& message, TrainTrace trace)
      : Error(ErrorCode::NonFiniteLoss, message), trace_(std::move(trace)) {}
  const TrainTrace& trace() const noexcept { return trace_; }

 private:
  TrainTrace trace_;
};

struct TrainResult {
  Mlp model;
  TrainTrace trace;
};

// Mini-batch Adam over `train`; `val` drives the plateau scheduler (falls back
// to the training loss when empty). Batch order comes from a per-run RNG
// seeded with config.seed.
TrainResult train(Mlp model, const TrainingData& train_data,
                  const TrainingData& val_data, const LossSpec& loss,
                  const TrainConfig& config);

struct GuidelineVerdict {
  bool loss_condition = false;
  bool gradient_condition = false;
  double min_loss_ratio = 0.0;
  double max_gradient_ratio = 0.0;
  std::size_t epochs_checked = 0;

  bool passed() const noexcept { return loss_condition && gradient_condition; }
  nlohmann::json to_json() const;
};

// Over epochs 2..min(20, len): min val-loss ratio to epoch 1 must be <= 1/2
// and max mean-|gradient| ratio to epoch 1 must be >= 2. Throws
// InsufficientEpochs for traces shorter than 2.
GuidelineVerdict guideline_check(const TrainTrace& trace);

}  // namespace fastcar
