#include "fastcar/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "fastcar/error.hpp"
#include "text.hpp"

namespace fastcar {

LabeledDataset::LabeledDataset(std::vector<Record> records,
                               std::size_t n_classes,
                               std::vector<std::string> class_names)
    : records_(std::move(records)),
      n_classes_(n_classes),
      class_names_(std::move(class_names)) {
  if (records_.empty()) throw Error(ErrorCode::EmptyInput, "dataset is empty");
  if (n_classes_ == 0) {
    throw Error(ErrorCode::InvalidArgument, "dataset needs at least one class");
  }
  if (!class_names_.empty() && class_names_.size() != n_classes_) {
    throw Error(ErrorCode::InvalidArgument, "class name count mismatch");
  }
  feature_dim_ = records_.front().features.size();
  std::vector<std::size_t> seen(n_classes_, 0);
  for (const auto& r : records_) {
    if (r.features.size() != feature_dim_) {
      throw Error(ErrorCode::DimMismatch,
                  "record '" + r.id + "' has " +
                      std::to_string(r.features.size()) + " features, expected " +
                      std::to_string(feature_dim_));
    }
    if (r.class_index < 1 ||
        static_cast<std::size_t>(r.class_index) > n_classes_) {
      throw Error(ErrorCode::ClassOutOfRange,
                  "record '" + r.id + "' has class " +
                      std::to_string(r.class_index));
    }
    if (!std::isfinite(r.property)) {
      throw Error(ErrorCode::NonFiniteInput,
                  "record '" + r.id + "' has a non-finite property");
    }
    ++seen[static_cast<std::size_t>(r.class_index - 1)];
  }
  for (std::size_t c = 0; c < n_classes_; ++c) {
    if (seen[c] == 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "class " + std::to_string(c + 1) + " has no records");
    }
  }
}

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(n_classes_, 0);
  for (const auto& r : records_) {
    ++counts[static_cast<std::size_t>(r.class_index - 1)];
  }
  return counts;
}

std::string LabeledDataset::to_jsonl() const {
  std::string out;
  for (const auto& r : records_) {
    nlohmann::json line = {{"id", r.id},
                           {"class_index", r.class_index},
                           {"property", r.property},
                           {"features", r.features}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

LabeledDataset LabeledDataset::from_jsonl(const std::string& text) {
  std::vector<Record> records;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  int max_class = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      Record r;
      r.id = doc.at("id").is_string() ? doc["id"].get<std::string>()
                                      : doc["id"].dump();
      r.class_index = doc.at("class_index").get<int>();
      r.property = doc.at("property").get<double>();
      r.features = doc.at("features").get<std::vector<double>>();
      max_class = std::max(max_class, r.class_index);
      records.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::MalformedRow, e.what(), line_no);
    }
  }
  if (records.empty()) throw Error(ErrorCode::EmptyFile, "no records");
  return LabeledDataset(std::move(records),
                        static_cast<std::size_t>(std::max(max_class, 0)));
}

using detail::lower;
using detail::parse_double;
using detail::parse_long;
using detail::read_file;
using detail::split_fields;

LabeledDataset parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    header = split_fields(line);
    break;
  }
  if (header.empty()) throw Error(ErrorCode::EmptyFile, "no header or rows");
  if (header.size() < 3 || lower(header[0]) != "id" ||
      lower(header[1]) != "class" || lower(header[2]) != "property") {
    throw Error(ErrorCode::MissingHeader,
                "expected header 'id,class,property[,features...]'", line_no);
  }

  struct Row {
    std::string id;
    std::string cls;
    double property;
    std::vector<double> features;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::MalformedRow,
                  "expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()),
                  line_no);
    }
    if (fields[1].empty()) {
      throw Error(ErrorCode::MalformedRow, "empty class", line_no);
    }
    Row row{fields[0], fields[1], 0.0, {}};
    if (!parse_double(fields[2], row.property)) {
      throw Error(ErrorCode::NonNumericProperty,
                  "property '" + fields[2] + "' is not a finite number",
                  line_no);
    }
    for (std::size_t f = 3; f < fields.size(); ++f) {
      double value = 0.0;
      if (!parse_double(fields[f], value)) {
        throw Error(ErrorCode::MalformedRow,
                    "feature '" + header[f] + "' is not numeric", line_no);
      }
      row.features.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyFile, "header without rows");

  // Class mapping.
  std::vector<std::string> names;
  std::map<std::string, int> index_of;
  bool all_integer = true;
  for (const auto& row : rows) {
    long long ignored = 0;
    if (!parse_long(row.cls, ignored)) {
      all_integer = false;
      break;
    }
  }
  if (all_integer) {
    std::map<long long, std::string> ordered;
    for (const auto& row : rows) {
      long long v = 0;
      parse_long(row.cls, v);
      ordered.emplace(v, row.cls);
    }
    for (const auto& [value, token] : ordered) {
      names.push_back(token);
      index_of[token] = static_cast<int>(names.size());
    }
    // Tokens such as "01" and "1" share a numeric value.
    for (const auto& row : rows) {
      long long v = 0;
      parse_long(row.cls, v);
      index_of[row.cls] = index_of[ordered[v]];
    }
  } else {
    for (const auto& row : rows) {
      if (index_of.emplace(row.cls, static_cast<int>(names.size()) + 1).second) {
        names.push_back(row.cls);
      }
    }
  }

  std::vector<Record> records;
  records.reserve(rows.size());
  for (auto& row : rows) {
    records.push_back({std::move(row.id), std::move(row.features),
                       index_of.at(row.cls), row.property});
  }
  const auto n = names.size();
  return LabeledDataset(std::move(records), n, std::move(names));
}

LabeledDataset load_csv(const std::filesystem::path& path) {
  return parse_csv(read_file(path));
}

void save_jsonl(const LabeledDataset& dataset,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << dataset.to_jsonl();
}

LabeledDataset load_jsonl(const std::filesystem::path& path) {
  return LabeledDataset::from_jsonl(read_file(path));
}

ClassIntervals default_synth_intervals(std::size_t n_classes) {
  if (n_classes == 0) {
    throw Error(ErrorCode::InvalidArgument, "n_classes must be positive");
  }
  // Nested-ish ranges: each class starts a little higher and ends only
  // slightly above the previous one.
  std::vector<Interval> bounds;
  for (std::size_t i = 0; i < n_classes; ++i) {
    const auto k = static_cast<double>(i);
    bounds.push_back({10.0 + 0.2 * k, 12.0 + 0.05 * k});
  }
  return ClassIntervals(std::move(bounds));
}

LabeledDataset synth_generate(const SynthParams& params) {
  if (params.n_classes < 2) {
    throw Error(ErrorCode::InvalidArgument, "synthetic task needs >= 2 classes");
  }
  if (params.per_class < 10) {
    throw Error(ErrorCode::InvalidArgument, "per_class must be >= 10");
  }
  if (params.feature_dim < 2) {
    throw Error(ErrorCode::InvalidArgument, "feature_dim must be >= 2");
  }
  if (!(params.separation >= 0.0) || !(params.noise_sd >= 0.0) ||
      !(params.cluster_sd >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "separation, noise_sd and cluster_sd must be non-negative");
  }
  const ClassIntervals intervals =
      params.intervals.empty() ? default_synth_intervals(params.n_classes)
                               : ClassIntervals(params.intervals);
  if (intervals.size() != params.n_classes) {
    throw Error(ErrorCode::IntervalCountMismatch,
                std::to_string(intervals.size()) + " intervals for " +
                    std::to_string(params.n_classes) + " classes");
  }

  std::mt19937_64 rng(params.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  const std::size_t cluster_dim = params.feature_dim - 1;

  std::vector<std::vector<double>> centres(params.n_classes,
                                           std::vector<double>(cluster_dim));
  for (auto& c : centres) {
    for (auto& x : c) x = unit_normal(rng);
  }
  double closest = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < centres.size(); ++p) {
    for (std::size_t q = p + 1; q < centres.size(); ++q) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < cluster_dim; ++j) {
        const double diff = centres[p][j] - centres[q][j];
        d2 += diff * diff;
      }
      closest = std::min(closest, std::sqrt(d2));
    }
  }
  const double scale = closest > 0.0 ? params.separation / closest : 0.0;
  for (auto& c : centres) {
    for (auto& x : c) x *= scale;
  }

  std::vector<Record> records;
  records.reserve(params.n_classes * params.per_class);
  for (std::size_t c = 0; c < params.n_classes; ++c) {
    const Interval& range = intervals.bounds()[c];
    std::uniform_real_distribution<double> property_dist(range.lo, range.hi);
    for (std::size_t k = 0; k < params.per_class; ++k) {
      Record r;
      r.class_index = static_cast<int>(c) + 1;
      r.property = range.width() > 0.0 ? property_dist(rng) : range.lo;
      r.features.resize(params.feature_dim);
      for (std::size_t j = 0; j < cluster_dim; ++j) {
        r.features[j] = centres[c][j] + params.cluster_sd * unit_normal(rng);
      }
      r.features[cluster_dim] = r.property + params.noise_sd * unit_normal(rng);
      r.id = "s" + std::to_string(records.size() + 1);
      records.push_back(std::move(r));
    }
  }
  std::vector<std::string> names;
  for (std::size_t c = 1; c <= params.n_classes; ++c) {
    names.push_back(std::to_string(c));
  }
  return LabeledDataset(std::move(records), params.n_classes, std::move(names));
}

SplitAssignment split(const LabeledDataset& dataset, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> by_class(dataset.n_classes());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_class[static_cast<std::size_t>(dataset[i].class_index - 1)].push_back(i);
  }
  std::mt19937_64 rng(seed);
  SplitAssignment out;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < 7) {
      throw Error(ErrorCode::ClassTooSmall,
                  "class " + std::to_string(c + 1) + " has " +
                      std::to_string(members.size()) + " records, need 7");
    }
    std::shuffle(members.begin(), members.end(), rng);
    const std::size_t held = members.size() / 7;
    const std::size_t n_train = members.size() - 2 * held;
    out.train.insert(out.train.end(), members.begin(),
                     members.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.val.insert(out.val.end(),
                   members.begin() + static_cast<std::ptrdiff_t>(n_train),
                   members.begin() + static_cast<std::ptrdiff_t>(n_train + held));
    out.test.insert(out.test.end(),
                    members.begin() + static_cast<std::ptrdiff_t>(n_train + held),
                    members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

ClassIntervals class_intervals(const LabeledDataset& dataset,
                               std::span<const std::size_t> indices) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> bounds(dataset.n_classes(), Interval{inf, -inf});
  for (const auto i : indices) {
    const Record& r = dataset[i];
    auto& b = bounds[static_cast<std::size_t>(r.class_index - 1)];
    b.lo = std::min(b.lo, r.property);
    b.hi = std::max(b.hi, r.property);
  }
  for (std::size_t c = 0; c < bounds.size(); ++c) {
    if (bounds[c].lo > bounds[c].hi) {
      throw Error(ErrorCode::InvalidArgument,
                  "class " + std::to_string(c + 1) +
                      " is absent from the selected records");
    }
  }
  return ClassIntervals(std::move(bounds));
}

}  // namespace fastcar
