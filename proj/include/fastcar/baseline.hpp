#pragma once

// Hard-parameter-sharing reference model: one shared ReLU stack feeding a
// classification head (n logits) and a regression head (1 output), trained
// on cross-entropy + squared error with equal weights.

#include <span>

#include "fastcar/data.hpp"
#include "fastcar/metrics.hpp"
#include "fastcar/neural.hpp"

namespace fastcar {

inline constexpr const char* kBaselineModelTag = "baseline-hps-ew";

struct BaselineOptions {
  double class_weight = 1.0;
  double regression_weight = 1.0;
  // Regression targets are property * target_scale; predictions are divided
  // back before scoring.
  double target_scale = 1.0;
};

struct BaselineRun {
  EvalReport report;
  Mlp model;
  TrainTrace trace;
};

BaselineRun run_baseline(const LabeledDataset& dataset,
                         const SplitAssignment& splits,
                         const TrainConfig& config,
                         const BaselineOptions& options = {});

// Layer widths [d, hidden..., n + 1].
MlpSpec baseline_spec(std::size_t feature_dim, std::size_t n_classes,
                      const TrainConfig& config);

TrainingData baseline_training_data(const LabeledDataset& dataset,
                                    std::span<const std::size_t> indices,
                                    double target_scale = 1.0);

struct BaselinePrediction {
  int class_index = 0;  // argmax of the logits, ties to the lower index
  double property = 0.0;
};

BaselinePrediction baseline_infer(const Mlp& model, std::size_t n_classes,
                                  std::span<const double> features,
                                  double target_scale = 1.0);

}  // namespace fastcar
