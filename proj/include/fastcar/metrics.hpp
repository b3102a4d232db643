#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include <json.hpp>

namespace fastcar {

// Scores for one pipeline run on one split. Raw units throughout: mse in
// property units squared, mape as a fraction (0.024 == 2.4 %).
struct EvalReport {
  std::string model;
  double accuracy = 0.0;
  double mse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  std::size_t n_samples = 0;
  std::size_t n_clamped = 0;
  // Held-out records whose property lay outside the training-derived range.
  std::size_t n_out_of_interval = 0;
  std::optional<double> wall_train_ms;
  std::optional<double> wall_infer_ms;

  // Wall-clock fields are omitted unless asked for so that reports from
  // identical seeds compare byte-for-byte.
  nlohmann::json to_json(bool include_wall_clock = false) const;
};

double accuracy(std::span<const int> true_classes,
                std::span<const int> pred_classes);
double mse(std::span<const double> true_vals, std::span<const double> pred_vals);
double mae(std::span<const double> true_vals, std::span<const double> pred_vals);
// Throws ZeroTrueValue when any true value is zero.
double mape(std::span<const double> true_vals,
            std::span<const double> pred_vals);

}  // namespace fastcar
