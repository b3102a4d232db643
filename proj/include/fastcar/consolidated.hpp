#pragma once

// Single-output pipeline: fold class and property into hybrid labels, train
// one regression network on them, decode its predictions.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fastcar/data.hpp"
#include "fastcar/labelspace.hpp"
#include "fastcar/metrics.hpp"
#include "fastcar/neural.hpp"

namespace fastcar {

inline constexpr const char* kFastcarModelTag = "fastcar";

using CodecFactory = std::function<HybridLabelCodec(const ClassIntervals&)>;

struct FastcarRun {
  EvalReport report;
  HybridLabelCodec codec;
  SpacingReport spacing;
  Mlp model;
  TrainTrace trace;
  std::optional<GuidelineVerdict> guideline;  // absent for 1-epoch runs
};

// Intervals come from the training split only. Held-out records outside
// them are encoded anyway and counted in report.n_out_of_interval.
FastcarRun run_fastcar(const LabeledDataset& dataset,
                       const SplitAssignment& splits,
                       const TransformConfig& transform,
                       const TrainConfig& config);

FastcarRun run_fastcar_with(const LabeledDataset& dataset,
                            const SplitAssignment& splits,
                            const CodecFactory& make_codec,
                            const TrainConfig& config,
                            std::string model_tag = kFastcarModelTag);

// Hybrid targets for `indices`; the count of out-of-interval encodings is
// added to `out_of_interval` when given.
TrainingData hybrid_training_data(const HybridLabelCodec& codec,
                                  const LabeledDataset& dataset,
                                  std::span<const std::size_t> indices,
                                  std::size_t* out_of_interval = nullptr);

// Decodes one prediction per index in `indices` and scores it.
EvalReport score_hybrid_predictions(const HybridLabelCodec& codec,
                                    const LabeledDataset& dataset,
                                    std::span<const std::size_t> indices,
                                    std::span<const double> predictions,
                                    std::string model_tag = kFastcarModelTag);

struct Inference {
  int class_index = 0;
  double property = 0.0;
  bool clamped = false;
};

// One forward pass, one decode.
Inference infer(const HybridLabelCodec& codec, const Mlp& model,
                std::span<const double> features);

}  // namespace fastcar
