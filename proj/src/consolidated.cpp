#include "fastcar/consolidated.hpp"

#include <chrono>

#include "fastcar/error.hpp"

namespace fastcar {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

TrainingData hybrid_training_data(const HybridLabelCodec& codec,
                                  const LabeledDataset& dataset,
                                  std::span<const std::size_t> indices,
                                  std::size_t* out_of_interval) {
  TrainingData data;
  data.features.reserve(indices.size());
  data.targets.reserve(indices.size());
  for (const auto i : indices) {
    const Record& r = dataset[i];
    if (out_of_interval && !codec.intervals().at(r.class_index).contains(r.property)) {
      ++*out_of_interval;
    }
    data.features.push_back(r.features);
    data.targets.push_back(
        {r.class_index, codec.encode_unchecked(r.class_index, r.property)});
  }
  return data;
}

EvalReport score_hybrid_predictions(const HybridLabelCodec& codec,
                                    const LabeledDataset& dataset,
                                    std::span<const std::size_t> indices,
                                    std::span<const double> predictions,
                                    std::string model_tag) {
  if (indices.size() != predictions.size()) {
    throw Error(ErrorCode::LengthMismatch, "one prediction per record needed");
  }
  std::vector<int> true_classes;
  std::vector<int> pred_classes;
  std::vector<double> true_props;
  std::vector<double> pred_props;
  EvalReport report;
  report.model = std::move(model_tag);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const Record& r = dataset[indices[k]];
    const Decoded d = codec.decode(predictions[k]);
    true_classes.push_back(r.class_index);
    pred_classes.push_back(d.class_index);
    true_props.push_back(r.property);
    pred_props.push_back(d.property);
    if (d.clamped) ++report.n_clamped;
  }
  report.n_samples = indices.size();
  report.accuracy = accuracy(true_classes, pred_classes);
  report.mse = mse(true_props, pred_props);
  report.mae = mae(true_props, pred_props);
  report.mape = mape(true_props, pred_props);
  return report;
}

Inference infer(const HybridLabelCodec& codec, const Mlp& model,
                std::span<const double> features) {
  if (model.spec().output_dim() != 1) {
    throw Error(ErrorCode::DimMismatch, "hybrid inference needs one output");
  }
  const auto out = model.forward(features);
  const Decoded d = codec.decode(out[0]);
  return {d.class_index, d.property, d.clamped};
}

FastcarRun run_fastcar(const LabeledDataset& dataset,
                       const SplitAssignment& splits,
                       const TransformConfig& transform,
                       const TrainConfig& config) {
  transform.validate();
  return run_fastcar_with(
      dataset, splits,
      [&](const ClassIntervals& intervals) {
        return HybridLabelCodec::fit(intervals, transform);
      },
      config);
}

FastcarRun run_fastcar_with(const LabeledDataset& dataset,
                            const SplitAssignment& splits,
                            const CodecFactory& make_codec,
                            const TrainConfig& config, std::string model_tag) {
  config.validate();
  if (dataset.feature_dim() == 0) {
    throw Error(ErrorCode::DimMismatch, "dataset has no features to learn from");
  }
  if (splits.test.empty()) throw Error(ErrorCode::EmptyInput, "empty test split");

  HybridLabelCodec codec = make_codec(class_intervals(dataset, splits.train));
  if (!dataset.class_names().empty()) codec.set_class_names(dataset.class_names());
  SpacingReport spacing = validate_spacing(codec);

  std::size_t out_of_interval = 0;
  const TrainingData train_data = hybrid_training_data(codec, dataset, splits.train);
  const TrainingData val_data =
      hybrid_training_data(codec, dataset, splits.val, &out_of_interval);
  const TrainingData test_data =
      hybrid_training_data(codec, dataset, splits.test, &out_of_interval);

  MlpSpec spec;
  spec.layer_widths.push_back(dataset.feature_dim());
  spec.layer_widths.insert(spec.layer_widths.end(), config.hidden_widths.begin(),
                           config.hidden_widths.end());
  spec.layer_widths.push_back(1);

  const auto train_start = Clock::now();
  TrainResult trained = train(Mlp::initialize(spec, config.seed), train_data,
                              val_data, LossSpec::mse(), config);
  const double train_ms = elapsed_ms(train_start);

  const auto infer_start = Clock::now();
  std::vector<double> predictions;
  predictions.reserve(test_data.size());
  for (const auto& x : test_data.features) {
    predictions.push_back(trained.model.forward(x)[0]);
  }
  EvalReport report = score_hybrid_predictions(codec, dataset, splits.test,
                                               predictions, std::move(model_tag));
  report.wall_infer_ms = elapsed_ms(infer_start);
  report.wall_train_ms = train_ms;
  report.n_out_of_interval = out_of_interval;

  std::optional<GuidelineVerdict> guideline;
  if (trained.trace.epochs.size() >= 2) guideline = guideline_check(trained.trace);

  return {std::move(report), std::move(codec), std::move(spacing),
          std::move(trained.model), std::move(trained.trace), guideline};
}

}  // namespace fastcar
