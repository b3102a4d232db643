#include "fastcar/metrics.hpp"

#include <cmath>

#include "fastcar/error.hpp"

namespace fastcar {

namespace {

template <typename T>
void check_lengths(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
  if (a.empty()) throw Error(ErrorCode::EmptyInput, "no samples to score");
}

}  // namespace

double accuracy(std::span<const int> true_classes,
                std::span<const int> pred_classes) {
  check_lengths(true_classes, pred_classes);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < true_classes.size(); ++i) {
    if (true_classes[i] == pred_classes[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(true_classes.size());
}

double mse(std::span<const double> true_vals,
           std::span<const double> pred_vals) {
  check_lengths(true_vals, pred_vals);
  double sum = 0.0;
  for (std::size_t i = 0; i < true_vals.size(); ++i) {
    const double r = pred_vals[i] - true_vals[i];
    sum += r * r;
  }
  return sum / static_cast<double>(true_vals.size());
}

double mae(std::span<const double> true_vals,
           std::span<const double> pred_vals) {
  check_lengths(true_vals, pred_vals);
  double sum = 0.0;
  for (std::size_t i = 0; i < true_vals.size(); ++i) {
    sum += std::abs(pred_vals[i] - true_vals[i]);
  }
  return sum / static_cast<double>(true_vals.size());
}

double mape(std::span<const double> true_vals,
            std::span<const double> pred_vals) {
  check_lengths(true_vals, pred_vals);
  double sum = 0.0;
  for (std::size_t i = 0; i < true_vals.size(); ++i) {
    if (true_vals[i] == 0.0) {
      throw Error(ErrorCode::ZeroTrueValue,
                  "MAPE undefined: true value at position " +
                      std::to_string(i) + " is zero");
    }
    sum += std::abs(pred_vals[i] - true_vals[i]) / std::abs(true_vals[i]);
  }
  return sum / static_cast<double>(true_vals.size());
}

nlohmann::json EvalReport::to_json(bool include_wall_clock) const {
  nlohmann::json doc;
  doc["model"] = model;
  doc["accuracy_fraction"] = accuracy;
  doc["mse_raw"] = mse;
  doc["mae_raw"] = mae;
  doc["mape_fraction"] = mape;
  doc["n_samples"] = n_samples;
  doc["n_clamped"] = n_clamped;
  doc["n_out_of_interval"] = n_out_of_interval;
  if (include_wall_clock) {
    if (wall_train_ms) doc["wall_train_ms"] = *wall_train_ms;
    if (wall_infer_ms) doc["wall_infer_ms"] = *wall_infer_ms;
  }
  return doc;
}

}  // namespace fastcar
