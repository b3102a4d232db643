#pragma once

// JSON-configured experiment runs: dataset source, codec and training
// settings, which pipelines to run, where to write the reports.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fastcar/data.hpp"
#include "fastcar/labelspace.hpp"
#include "fastcar/neural.hpp"

namespace fastcar {

struct DatasetSource {
  enum class Kind { Synth, Csv, Jsonl };
  Kind kind = Kind::Synth;
  SynthParams synth;
  std::filesystem::path path;  // resolved against the config's directory
};

struct ExperimentConfig {
  std::uint64_t seed = 7;
  DatasetSource dataset;
  TransformConfig transform{1.5, true, SpacingMode::PaperExact};
  TrainConfig train;
  std::vector<std::string> pipelines{"fastcar"};
  std::size_t timing_repeats = 3;
  std::size_t timing_infer_items = 20000;
  std::filesystem::path output_dir = "out";

  // Unknown keys and wrong types throw SchemaViolation with a JSON pointer
  // ("/train/learning_rate: expected a number"). Relative paths resolve
  // against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& doc,
                                    const std::filesystem::path& base_dir = {});
  static ExperimentConfig load(const std::filesystem::path& path);

  // Effective configuration, as written next to the reports.
  nlohmann::json to_json() const;
  bool wants(const std::string& pipeline) const;
};

using LogFn = std::function<void(const std::string&)>;

struct ExperimentOutcome {
  std::vector<std::filesystem::path> written;
  bool spacing_violations = false;
};

// Runs every requested pipeline and writes its reports. Files other than
// timing.json, timing.txt and wall_clock.json depend only on the config and
// seed.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const LogFn& log = {});

}  // namespace fastcar
