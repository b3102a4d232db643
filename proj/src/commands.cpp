#include "fastcar/commands.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "fastcar/data.hpp"
#include "fastcar/error.hpp"
#include "text.hpp"

namespace fastcar {

namespace {

void emit(const LogFn& log, const std::string& line) {
  if (log) log(line);
}

std::string shortest(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

HybridLabelCodec load_codec(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
  }
  return HybridLabelCodec::from_json(doc);
}

// Lines of a two-or-more column CSV with its header already checked.
struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

std::vector<CsvRow> read_rows(const std::filesystem::path& path,
                              const std::vector<std::string>& expected_header) {
  std::istringstream in(detail::read_file(path));
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    header = detail::split_fields(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::EmptyFile, path.string() + " is empty");
  bool ok = header.size() >= expected_header.size();
  for (std::size_t i = 0; ok && i < expected_header.size(); ++i) {
    ok = detail::lower(header[i]) == expected_header[i];
  }
  if (!ok) {
    std::string want;
    for (const auto& h : expected_header) want += (want.empty() ? "" : ",") + h;
    throw Error(ErrorCode::MissingHeader, "expected header starting '" + want + "'",
                line_no);
  }
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::is_blank(line)) continue;
    rows.push_back({line_no, detail::split_fields(line)});
  }
  return rows;
}

int class_for_token(const HybridLabelCodec& codec, const std::string& token) {
  const auto& names = codec.class_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == token) return static_cast<int>(i) + 1;
  }
  long long value = 0;
  if (names.empty() && detail::parse_long(token, value) && value >= 1 &&
      value <= static_cast<long long>(codec.size())) {
    return static_cast<int>(value);
  }
  return 0;
}

template <typename Body>
int guarded(const LogFn& log, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    emit(log, std::string("error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    emit(log, std::string("error: ") + e.what());
  } catch (const std::exception& e) {
    emit(log, std::string("error: ") + e.what());
  }
  return kExitError;
}

}  // namespace

std::filesystem::path default_spacing_report_path(const std::filesystem::path& codec) {
  auto report = codec;
  report.replace_extension(".spacing.json");
  return report;
}

int cmd_fit_codec(const FitCodecArgs& args, const LogFn& log) {
  return guarded(log, [&] {
    args.transform.validate();
    const auto dataset = load_csv(args.labels_csv);
    std::vector<std::size_t> all(dataset.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto codec = HybridLabelCodec::fit(class_intervals(dataset, all), args.transform);
    codec.set_class_names(dataset.class_names());
    const auto report = validate_spacing(codec);

    detail::write_file(args.out_path, codec.to_json().dump(2) + "\n");
    const auto report_path =
        args.report_path.value_or(default_spacing_report_path(args.out_path));
    detail::write_file(report_path, report.to_json().dump(2) + "\n");

    emit(log, "codec: " + std::to_string(codec.size()) + " classes, delta " +
                  shortest(codec.delta()) + ", mode " +
                  to_string(args.transform.mode) + " -> " + args.out_path.string());
    if (!report.good()) {
      emit(log, report.render());
      return static_cast<int>(kExitViolations);
    }
    emit(log, "spacing: good");
    return static_cast<int>(kExitOk);
  });
}

int cmd_transform(const TransformArgs& args, const LogFn& log) {
  return guarded(log, [&] {
    const auto codec = load_codec(args.codec_path);
    const auto rows = read_rows(args.labels_csv, {"id", "class", "property"});
    std::ostringstream out;
    out << "id,hybrid_label\n";
    std::size_t bad = 0;
    for (const auto& row : rows) {
      const std::string where = "line " + std::to_string(row.line);
      if (row.fields.size() < 3) {
        emit(log, where + ": MalformedRow: too few fields");
        ++bad;
        continue;
      }
      const auto& id = row.fields[0];
      const int cls = class_for_token(codec, row.fields[1]);
      double property = 0.0;
      if (cls == 0) {
        emit(log, where + " id " + id + ": ClassOutOfRange: unknown class '" +
                      row.fields[1] + "'");
        ++bad;
        continue;
      }
      if (!detail::parse_double(row.fields[2], property)) {
        emit(log, where + " id " + id + ": NonNumericProperty: '" +
                      row.fields[2] + "'");
        ++bad;
        continue;
      }
      try {
        const double hybrid = codec.encode(cls, property);
        out << id << ',' << shortest(hybrid) << '\n';
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PropertyOutOfInterval) throw;
        emit(log, where + " id " + id + ": " + e.what());
        ++bad;
      }
    }
    detail::write_file(args.out_csv, out.str());
    emit(log, "transformed " + std::to_string(rows.size() - bad) + " of " +
                  std::to_string(rows.size()) + " rows -> " + args.out_csv.string());
    return static_cast<int>(bad == 0 ? kExitOk : kExitViolations);
  });
}

int cmd_decode(const DecodeArgs& args, const LogFn& log) {
  return guarded(log, [&] {
    const auto codec = load_codec(args.codec_path);
    const auto rows = read_rows(args.pred_csv, {"id", "prediction"});
    std::ostringstream out;
    out << "id,class_index,property,clamped\n";
    std::size_t bad = 0;
    for (const auto& row : rows) {
      const std::string where = "line " + std::to_string(row.line);
      double prediction = 0.0;
      if (row.fields.size() < 2 || !detail::parse_any_double(row.fields[1], prediction)) {
        emit(log, where + ": MalformedRow: expected 'id,prediction'");
        ++bad;
        continue;
      }
      if (!std::isfinite(prediction)) {
        emit(log, where + " id " + row.fields[0] + ": NonFiniteInput: " +
                      row.fields[1]);
        ++bad;
        continue;
      }
      const auto d = codec.decode(prediction);
      out << row.fields[0] << ',' << d.class_index << ',' << shortest(d.property)
          << ',' << (d.clamped ? 1 : 0) << '\n';
    }
    detail::write_file(args.out_csv, out.str());
    emit(log, "decoded " + std::to_string(rows.size() - bad) + " of " +
                  std::to_string(rows.size()) + " rows -> " + args.out_csv.string());
    return static_cast<int>(bad == 0 ? kExitOk : kExitViolations);
  });
}

int cmd_experiment(const ExperimentArgs& args, const LogFn& log) {
  return guarded(log, [&] {
    auto config = ExperimentConfig::load(args.config_path);
    if (args.seed) config.seed = *args.seed;
    if (args.output_dir) config.output_dir = *args.output_dir;
    const auto outcome = run_experiment(config, log);
    emit(log, "wrote " + std::to_string(outcome.written.size()) + " files to " +
                  config.output_dir.string());
    return static_cast<int>(outcome.spacing_violations ? kExitViolations : kExitOk);
  });
}

}  // namespace fastcar
