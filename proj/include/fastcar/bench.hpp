#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastcar/data.hpp"
#include "fastcar/labelspace.hpp"
#include "fastcar/metrics.hpp"
#include "fastcar/neural.hpp"

namespace fastcar {

struct AblationRow {
  std::string neurons;             // "1" or ">1"
  std::string labels;              // "good", "bad" or "n/a"
  std::optional<bool> centering;   // absent for the two-head row
  std::string status;              // "ok", "skipped", "substituted"
  std::string note;
  std::optional<EvalReport> report;
  std::optional<bool> spacing_good;
};

struct AblationTable {
  std::vector<AblationRow> rows;

  const AblationRow* find(const std::string& labels, bool centering) const;
  nlohmann::json to_json() const;
  std::string render() const;
};

// {good, bad} x {centered, uncentered} with a single output neuron, plus the
// two-head baseline standing in for the multi-output rows.
AblationTable run_ablation(const LabeledDataset& dataset,
                           const SplitAssignment& splits,
                           const TransformConfig& good_transform,
                           const TrainConfig& config);

struct TimingSample {
  double fastcar_train_ms = 0.0;
  double baseline_train_ms = 0.0;
  double fastcar_infer_us = 0.0;   // per item
  double baseline_infer_us = 0.0;  // per item
};

struct TimingReport {
  std::vector<TimingSample> runs;
  std::size_t infer_items = 0;
  double fastcar_train_ms = 0.0;   // medians
  double baseline_train_ms = 0.0;
  double fastcar_infer_us = 0.0;
  double baseline_infer_us = 0.0;
  // baseline / fastcar; > 1 means the single-output model is faster.
  double train_ratio = 0.0;
  double infer_ratio = 0.0;
  double train_ratio_variance = 0.0;
  double infer_ratio_variance = 0.0;

  nlohmann::json to_json() const;
  std::string render() const;
};

// Trains both pipelines `repeats` times on identical shared stacks and times
// `infer_items` single-item inferences for each (test split, cycled).
TimingReport run_timing(const LabeledDataset& dataset,
                        const SplitAssignment& splits,
                        const TransformConfig& transform,
                        const TrainConfig& config, std::size_t repeats = 3,
                        std::size_t infer_items = 20000);

double median(std::vector<double> values);

}  // namespace fastcar
