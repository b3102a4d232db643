#pragma once

// File-level commands behind the CLI. None of them throw: failures become
// exit code 1 plus a message, row-level problems become exit code 2.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fastcar/experiment.hpp"
#include "fastcar/labelspace.hpp"

namespace fastcar {

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitViolations = 2 };

struct FitCodecArgs {
  std::filesystem::path labels_csv;
  TransformConfig transform;
  std::filesystem::path out_path;
  // Defaults to out_path with its extension replaced by ".spacing.json".
  std::optional<std::filesystem::path> report_path;
};

struct TransformArgs {
  std::filesystem::path labels_csv;
  std::filesystem::path codec_path;
  std::filesystem::path out_csv;
};

struct DecodeArgs {
  std::filesystem::path pred_csv;
  std::filesystem::path codec_path;
  std::filesystem::path out_csv;
};

struct ExperimentArgs {
  std::filesystem::path config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
};

std::filesystem::path default_spacing_report_path(const std::filesystem::path& codec);

int cmd_fit_codec(const FitCodecArgs& args, const LogFn& log = {});
int cmd_transform(const TransformArgs& args, const LogFn& log = {});
int cmd_decode(const DecodeArgs& args, const LogFn& log = {});
int cmd_experiment(const ExperimentArgs& args, const LogFn& log = {});

}  // namespace fastcar
