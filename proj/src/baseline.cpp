#include "fastcar/baseline.hpp"

#include <chrono>

#include "fastcar/error.hpp"

namespace fastcar {

MlpSpec baseline_spec(std::size_t feature_dim, std::size_t n_classes,
                      const TrainConfig& config) {
  MlpSpec spec;
  spec.layer_widths.push_back(feature_dim);
  spec.layer_widths.insert(spec.layer_widths.end(), config.hidden_widths.begin(),
                           config.hidden_widths.end());
  spec.layer_widths.push_back(n_classes + 1);
  return spec;
}

TrainingData baseline_training_data(const LabeledDataset& dataset,
                                    std::span<const std::size_t> indices,
                                    double target_scale) {
  TrainingData data;
  for (const auto i : indices) {
    const Record& r = dataset[i];
    data.features.push_back(r.features);
    data.targets.push_back({r.class_index, r.property * target_scale});
  }
  return data;
}

BaselinePrediction baseline_infer(const Mlp& model, std::size_t n_classes,
                                  std::span<const double> features,
                                  double target_scale) {
  if (model.spec().output_dim() != n_classes + 1) {
    throw Error(ErrorCode::DimMismatch, "baseline model needs n + 1 outputs");
  }
  const auto out = model.forward(features);
  std::size_t best = 0;
  for (std::size_t j = 1; j < n_classes; ++j) {
    if (out[j] > out[best]) best = j;
  }
  return {static_cast<int>(best) + 1, out[n_classes] / target_scale};
}

BaselineRun run_baseline(const LabeledDataset& dataset,
                         const SplitAssignment& splits,
                         const TrainConfig& config,
                         const BaselineOptions& options) {
  using Clock = std::chrono::steady_clock;
  config.validate();
  if (dataset.feature_dim() == 0) {
    throw Error(ErrorCode::DimMismatch, "dataset has no features to learn from");
  }
  if (!(options.target_scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "target_scale must be positive");
  }
  if (splits.test.empty()) throw Error(ErrorCode::EmptyInput, "empty test split");
  // Same precondition as the hybrid pipeline.
  class_intervals(dataset, splits.train);

  const std::size_t n = dataset.n_classes();
  const auto loss =
      LossSpec::two_head(n, options.class_weight, options.regression_weight);
  const auto train_data =
      baseline_training_data(dataset, splits.train, options.target_scale);
  const auto val_data =
      baseline_training_data(dataset, splits.val, options.target_scale);

  const auto train_start = Clock::now();
  TrainResult trained =
      train(Mlp::initialize(baseline_spec(dataset.feature_dim(), n, config),
                            config.seed),
            train_data, val_data, loss, config);
  const std::chrono::duration<double, std::milli> train_ms =
      Clock::now() - train_start;

  const auto infer_start = Clock::now();
  std::vector<int> true_classes;
  std::vector<int> pred_classes;
  std::vector<double> true_props;
  std::vector<double> pred_props;
  for (const auto i : splits.test) {
    const Record& r = dataset[i];
    const auto p = baseline_infer(trained.model, n, r.features, options.target_scale);
    true_classes.push_back(r.class_index);
    pred_classes.push_back(p.class_index);
    true_props.push_back(r.property);
    pred_props.push_back(p.property);
  }
  EvalReport report;
  report.model = kBaselineModelTag;
  report.n_samples = splits.test.size();
  report.accuracy = accuracy(true_classes, pred_classes);
  report.mse = mse(true_props, pred_props);
  report.mae = mae(true_props, pred_props);
  report.mape = mape(true_props, pred_props);
  const std::chrono::duration<double, std::milli> infer_ms =
      Clock::now() - infer_start;
  report.wall_train_ms = train_ms.count();
  report.wall_infer_ms = infer_ms.count();
  return {std::move(report), std::move(trained.model), std::move(trained.trace)};
}

}  // namespace fastcar
