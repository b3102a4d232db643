#include "fastcar/fastcar.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "fastcar/commands.hpp"
#include "fastcar/data.hpp"
#include "fastcar/error.hpp"
#include "fastcar/labelspace.hpp"

struct fastcar_codec {
  fastcar::HybridLabelCodec codec;
};

struct fastcar_dataset {
  fastcar::LabeledDataset dataset;
};

namespace {

thread_local std::string last_error;

fastcar_status from_code(fastcar::ErrorCode code) {
  return static_cast<fastcar_status>(static_cast<int>(code) + 1);
}

template <typename Body>
fastcar_status guard(Body&& body) {
  last_error.clear();
  try {
    body();
    return FASTCAR_OK;
  } catch (const fastcar::Error& e) {
    last_error = e.what();
    return from_code(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return FASTCAR_E_INTERNAL;
}

void require(bool condition, const char* what) {
  if (!condition) throw fastcar::Error(fastcar::ErrorCode::InvalidArgument, what);
}

char* duplicate(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

fastcar::ClassIntervals to_intervals(const fastcar_interval* bounds, size_t n) {
  require(bounds != nullptr || n == 0, "bounds is NULL");
  std::vector<fastcar::Interval> out;
  out.reserve(n);
  for (size_t i = 0; i < n; ++i) out.push_back({bounds[i].lo, bounds[i].hi});
  return fastcar::ClassIntervals(std::move(out));
}

fastcar::TransformConfig to_config(const fastcar_transform_config* config) {
  require(config != nullptr, "config is NULL");
  require(config->mode == FASTCAR_MODE_PAPER_EXACT ||
              config->mode == FASTCAR_MODE_STRICT_SPACING,
          "unknown spacing mode");
  return {config->u, config->centering != 0,
          config->mode == FASTCAR_MODE_PAPER_EXACT
              ? fastcar::SpacingMode::PaperExact
              : fastcar::SpacingMode::StrictSpacing};
}

fastcar::LogFn to_log(fastcar_log_fn log, void* user) {
  if (log == nullptr) return {};
  return [log, user](const std::string& line) { log(line.c_str(), user); };
}

}  // namespace

extern "C" {

const char* fastcar_version(void) { return "0.1.0"; }

const char* fastcar_status_name(fastcar_status status) {
  static thread_local std::string name;
  if (status == FASTCAR_OK) return "Ok";
  if (status == FASTCAR_E_INTERNAL) return "Internal";
  const int index = static_cast<int>(status) - 1;
  if (index < 0 || index > static_cast<int>(fastcar::ErrorCode::Parse)) {
    return "Unknown";
  }
  name = std::string(fastcar::to_string(static_cast<fastcar::ErrorCode>(index)));
  return name.c_str();
}

const char* fastcar_last_error(void) { return last_error.c_str(); }

void fastcar_string_free(char* text) { delete[] text; }

fastcar_transform_config fastcar_transform_config_default(void) {
  return {1.5, 1, FASTCAR_MODE_PAPER_EXACT};
}

fastcar_status fastcar_mode_parse(const char* text, fastcar_mode* out) {
  return guard([&] {
    require(text != nullptr && out != nullptr, "NULL argument");
    *out = fastcar::spacing_mode_from_string(text) == fastcar::SpacingMode::PaperExact
               ? FASTCAR_MODE_PAPER_EXACT
               : FASTCAR_MODE_STRICT_SPACING;
  });
}

fastcar_status fastcar_codec_fit(const fastcar_interval* bounds, size_t n_classes,
                                 const fastcar_transform_config* config,
                                 fastcar_codec** out) {
  return guard([&] {
    require(out != nullptr, "out is NULL");
    *out = nullptr;
    auto codec = fastcar::HybridLabelCodec::fit(to_intervals(bounds, n_classes),
                                                to_config(config));
    *out = new fastcar_codec{std::move(codec)};
  });
}

fastcar_status fastcar_codec_bad(const fastcar_interval* bounds, size_t n_classes,
                                 int centering, fastcar_codec** out) {
  return guard([&] {
    require(out != nullptr, "out is NULL");
    *out = nullptr;
    auto codec = fastcar::make_bad_codec(to_intervals(bounds, n_classes),
                                         centering != 0);
    *out = new fastcar_codec{std::move(codec)};
  });
}

fastcar_status fastcar_codec_fit_dataset(const fastcar_dataset* dataset,
                                         const fastcar_transform_config* config,
                                         fastcar_codec** out) {
  return guard([&] {
    require(dataset != nullptr && out != nullptr, "NULL argument");
    *out = nullptr;
    const auto& ds = dataset->dataset;
    std::vector<std::size_t> all(ds.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto codec = fastcar::HybridLabelCodec::fit(fastcar::class_intervals(ds, all),
                                                to_config(config));
    codec.set_class_names(ds.class_names());
    *out = new fastcar_codec{std::move(codec)};
  });
}

void fastcar_codec_free(fastcar_codec* codec) { delete codec; }

fastcar_status fastcar_codec_encode(const fastcar_codec* codec, int class_index,
                                    double property, double* hybrid) {
  return guard([&] {
    require(codec != nullptr && hybrid != nullptr, "NULL argument");
    *hybrid = codec->codec.encode(class_index, property);
  });
}

fastcar_status fastcar_codec_decode(const fastcar_codec* codec, double hybrid,
                                    int* class_index, double* property,
                                    int* clamped) {
  return guard([&] {
    require(codec != nullptr && class_index != nullptr && property != nullptr,
            "NULL argument");
    if (!std::isfinite(hybrid)) {
      throw fastcar::Error(fastcar::ErrorCode::NonFiniteInput,
                           "prediction is not finite");
    }
    const auto d = codec->codec.decode(hybrid);
    *class_index = d.class_index;
    *property = d.property;
    if (clamped != nullptr) *clamped = d.clamped ? 1 : 0;
  });
}

size_t fastcar_codec_size(const fastcar_codec* codec) {
  return codec == nullptr ? 0 : codec->codec.size();
}

fastcar_status fastcar_codec_info(const fastcar_codec* codec, double* delta,
                                  double* shift) {
  return guard([&] {
    require(codec != nullptr, "codec is NULL");
    if (delta != nullptr) *delta = codec->codec.delta();
    if (shift != nullptr) *shift = codec->codec.shift();
  });
}

fastcar_status fastcar_codec_offsets(const fastcar_codec* codec, double* offsets,
                                     size_t capacity) {
  return guard([&] {
    require(codec != nullptr && offsets != nullptr, "NULL argument");
    const auto k = codec->codec.offsets();
    if (capacity < k.size()) {
      throw fastcar::Error(fastcar::ErrorCode::LengthMismatch,
                           "offset buffer holds " + std::to_string(capacity) +
                               ", need " + std::to_string(k.size()));
    }
    std::copy(k.begin(), k.end(), offsets);
  });
}

fastcar_status fastcar_codec_transformed_bounds(const fastcar_codec* codec,
                                                fastcar_interval* bounds,
                                                size_t capacity) {
  return guard([&] {
    require(codec != nullptr && bounds != nullptr, "NULL argument");
    const auto s = codec->codec.transformed_bounds();
    if (capacity < s.size()) {
      throw fastcar::Error(fastcar::ErrorCode::LengthMismatch,
                           "bounds buffer holds " + std::to_string(capacity) +
                               ", need " + std::to_string(s.size()));
    }
    for (std::size_t i = 0; i < s.size(); ++i) bounds[i] = {s[i].lo, s[i].hi};
  });
}

fastcar_status fastcar_codec_validate(const fastcar_codec* codec,
                                      size_t* n_violations, char** report_json) {
  return guard([&] {
    require(codec != nullptr && n_violations != nullptr, "NULL argument");
    const auto report = fastcar::validate_spacing(codec->codec);
    if (report_json != nullptr) *report_json = duplicate(report.to_json().dump());
    *n_violations = report.violations.size();
  });
}

fastcar_status fastcar_codec_to_json(const fastcar_codec* codec, char** json) {
  return guard([&] {
    require(codec != nullptr && json != nullptr, "NULL argument");
    *json = duplicate(codec->codec.to_json().dump());
  });
}

fastcar_status fastcar_codec_from_json(const char* json, fastcar_codec** out) {
  return guard([&] {
    require(json != nullptr && out != nullptr, "NULL argument");
    *out = nullptr;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(json);
    } catch (const nlohmann::json::parse_error& e) {
      throw fastcar::Error(fastcar::ErrorCode::Parse, e.what());
    }
    *out = new fastcar_codec{fastcar::HybridLabelCodec::from_json(doc)};
  });
}

fastcar_status fastcar_dataset_load_csv(const char* path, fastcar_dataset** out) {
  return guard([&] {
    require(path != nullptr && out != nullptr, "NULL argument");
    *out = nullptr;
    *out = new fastcar_dataset{fastcar::load_csv(path)};
  });
}

void fastcar_dataset_free(fastcar_dataset* dataset) { delete dataset; }

size_t fastcar_dataset_size(const fastcar_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->dataset.size();
}

size_t fastcar_dataset_classes(const fastcar_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->dataset.n_classes();
}

size_t fastcar_dataset_feature_dim(const fastcar_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->dataset.feature_dim();
}

int fastcar_cmd_fit_codec(const char* labels_csv,
                          const fastcar_transform_config* config,
                          const char* out_path, const char* report_path,
                          fastcar_log_fn log, void* user) {
  const auto sink = to_log(log, user);
  fastcar::FitCodecArgs args;
  const auto status = guard([&] {
    require(labels_csv != nullptr && out_path != nullptr, "NULL path");
    args.labels_csv = labels_csv;
    args.out_path = out_path;
    if (report_path != nullptr) args.report_path = report_path;
    args.transform = to_config(config);
  });
  if (status != FASTCAR_OK) {
    if (sink) sink(std::string("error: ") + last_error);
    return fastcar::kExitError;
  }
  return fastcar::cmd_fit_codec(args, sink);
}

int fastcar_cmd_transform(const char* labels_csv, const char* codec_path,
                          const char* out_csv, fastcar_log_fn log, void* user) {
  const auto sink = to_log(log, user);
  if (labels_csv == nullptr || codec_path == nullptr || out_csv == nullptr) {
    if (sink) sink("error: NULL path");
    return fastcar::kExitError;
  }
  return fastcar::cmd_transform({labels_csv, codec_path, out_csv}, sink);
}

int fastcar_cmd_decode(const char* pred_csv, const char* codec_path,
                       const char* out_csv, fastcar_log_fn log, void* user) {
  const auto sink = to_log(log, user);
  if (pred_csv == nullptr || codec_path == nullptr || out_csv == nullptr) {
    if (sink) sink("error: NULL path");
    return fastcar::kExitError;
  }
  return fastcar::cmd_decode({pred_csv, codec_path, out_csv}, sink);
}

int fastcar_cmd_experiment(const char* config_path, const unsigned long long* seed,
                           const char* output_dir, fastcar_log_fn log, void* user) {
  const auto sink = to_log(log, user);
  if (config_path == nullptr) {
    if (sink) sink("error: NULL config path");
    return fastcar::kExitError;
  }
  fastcar::ExperimentArgs args;
  args.config_path = config_path;
  if (seed != nullptr) args.seed = *seed;
  if (output_dir != nullptr) args.output_dir = output_dir;
  return fastcar::cmd_experiment(args, sink);
}

}  // extern "C"
