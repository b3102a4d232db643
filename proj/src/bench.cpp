#include "fastcar/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include "fastcar/baseline.hpp"
#include "fastcar/consolidated.hpp"
#include "fastcar/error.hpp"

namespace fastcar {

const AblationRow* AblationTable::find(const std::string& labels,
                                       bool centering) const {
  for (const auto& row : rows) {
    if (row.neurons == "1" && row.labels == labels && row.centering == centering) {
      return &row;
    }
  }
  return nullptr;
}

nlohmann::json AblationTable::to_json() const {
  auto doc = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json entry{{"neurons", row.neurons},
                         {"labels", row.labels},
                         {"status", row.status}};
    entry["centering"] = row.centering ? nlohmann::json(*row.centering)
                                       : nlohmann::json(nullptr);
    if (!row.note.empty()) entry["note"] = row.note;
    if (row.report) entry["report"] = row.report->to_json();
    if (row.spacing_good) entry["spacing_verdict"] = *row.spacing_good ? "good" : "bad";
    doc.push_back(std::move(entry));
  }
  return {{"ablation", std::move(doc)}};
}

std::string AblationTable::render() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s %-6s %-10s %-12s %10s %12s %10s\n",
                "neurons", "labels", "centering", "status", "accuracy",
                "mse", "mape");
  out << line;
  for (const auto& row : rows) {
    const std::string centering =
        row.centering ? (*row.centering ? "true" : "false") : "n/a";
    if (row.report) {
      std::snprintf(line, sizeof line,
                    "%-8s %-6s %-10s %-12s %9.2f%% %12.6f %9.2f%%\n",
                    row.neurons.c_str(), row.labels.c_str(), centering.c_str(),
                    row.status.c_str(), 100.0 * row.report->accuracy,
                    row.report->mse, 100.0 * row.report->mape);
    } else {
      std::snprintf(line, sizeof line, "%-8s %-6s %-10s %-12s %10s %12s %10s\n",
                    row.neurons.c_str(), row.labels.c_str(), centering.c_str(),
                    row.status.c_str(), "-", "-", "-");
    }
    out << line;
    if (!row.note.empty()) out << "    " << row.note << "\n";
  }
  return out.str();
}

AblationTable run_ablation(const LabeledDataset& dataset,
                           const SplitAssignment& splits,
                           const TransformConfig& good_transform,
                           const TrainConfig& config) {
  AblationTable table;
  for (const bool centering : {true, false}) {
    TransformConfig transform = good_transform;
    transform.centering = centering;
    const auto run = run_fastcar(dataset, splits, transform, config);
    table.rows.push_back({"1", "good", centering, "ok", "", run.report,
                          run.spacing.good()});
  }
  for (const bool centering : {true, false}) {
    AblationRow row{"1", "bad", centering, "ok", "", std::nullopt, std::nullopt};
    try {
      const auto run = run_fastcar_with(
          dataset, splits,
          [centering](const ClassIntervals& intervals) {
            return make_bad_codec(intervals, centering);
          },
          config);
      row.report = run.report;
      row.spacing_good = run.spacing.good();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoOverlapPossible) throw;
      row.status = "skipped";
      row.note = e.what();
    }
    table.rows.push_back(std::move(row));
  }
  const auto baseline = run_baseline(dataset, splits, config);
  table.rows.push_back(
      {">1", "n/a", std::nullopt, "substituted",
       "multi-output hybrid-label rows are not applicable; two-head baseline "
       "(n class logits + 1 regression output, equal weights) reported instead",
       baseline.report, std::nullopt});
  return table;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

double variance(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (const double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size() - 1);
}

template <typename Fn>
double per_item_us(std::size_t items, Fn&& fn) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  for (std::size_t i = 0; i < items; ++i) fn(i);
  const std::chrono::duration<double, std::micro> elapsed = Clock::now() - start;
  return elapsed.count() / static_cast<double>(items);
}

}  // namespace

nlohmann::json TimingReport::to_json() const {
  auto runs_json = nlohmann::json::array();
  for (const auto& r : runs) {
    runs_json.push_back({{"fastcar_train_ms", r.fastcar_train_ms},
                         {"baseline_train_ms", r.baseline_train_ms},
                         {"fastcar_infer_us_per_item", r.fastcar_infer_us},
                         {"baseline_infer_us_per_item", r.baseline_infer_us}});
  }
  return {{"runs", std::move(runs_json)},
          {"infer_items", infer_items},
          {"median", {{"fastcar_train_ms", fastcar_train_ms},
                      {"baseline_train_ms", baseline_train_ms},
                      {"fastcar_infer_us_per_item", fastcar_infer_us},
                      {"baseline_infer_us_per_item", baseline_infer_us}}},
          {"train_ratio_baseline_over_fastcar", train_ratio},
          {"infer_ratio_baseline_over_fastcar", infer_ratio},
          {"train_ratio_variance", train_ratio_variance},
          {"infer_ratio_variance", infer_ratio_variance}};
}

std::string TimingReport::render() const {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %16s %22s\n", "model",
                "train ms (med)", "infer us/item (med)");
  out << line;
  std::snprintf(line, sizeof line, "%-10s %16.1f %22.3f\n", "fastcar",
                fastcar_train_ms, fastcar_infer_us);
  out << line;
  std::snprintf(line, sizeof line, "%-10s %16.1f %22.3f\n", "baseline",
                baseline_train_ms, baseline_infer_us);
  out << line;
  std::snprintf(line, sizeof line,
                "train ratio %.3fx (var %.2e), inference ratio %.3fx (var %.2e) "
                "over %zu runs\n",
                train_ratio, train_ratio_variance, infer_ratio,
                infer_ratio_variance, runs.size());
  out << line;
  return out.str();
}

TimingReport run_timing(const LabeledDataset& dataset,
                        const SplitAssignment& splits,
                        const TransformConfig& transform,
                        const TrainConfig& config, std::size_t repeats,
                        std::size_t infer_items) {
  if (repeats == 0 || infer_items == 0) {
    throw Error(ErrorCode::InvalidArgument, "repeats and infer_items must be > 0");
  }
  TimingReport report;
  report.infer_items = infer_items;
  const std::size_t n = dataset.n_classes();
  std::vector<double> train_ratios;
  std::vector<double> infer_ratios;
  for (std::size_t rep = 0; rep < repeats; ++rep) {
    const auto fast = run_fastcar(dataset, splits, transform, config);
    const auto base = run_baseline(dataset, splits, config);

    const auto& test = splits.test;
    volatile double sink = 0.0;
    auto fast_item = [&](std::size_t i) {
      const auto r = infer(fast.codec, fast.model, dataset[test[i % test.size()]].features);
      sink = sink + r.property;
    };
    auto base_item = [&](std::size_t i) {
      const auto r = baseline_infer(base.model, n, dataset[test[i % test.size()]].features);
      sink = sink + r.property;
    };
    // Warm caches before timing either model.
    per_item_us(test.size(), fast_item);
    per_item_us(test.size(), base_item);

    TimingSample sample;
    sample.fastcar_train_ms = *fast.report.wall_train_ms;
    sample.baseline_train_ms = *base.report.wall_train_ms;
    // Alternating blocks so clock drift and frequency changes hit both alike.
    constexpr std::size_t kBlocks = 10;
    const std::size_t block = std::max<std::size_t>(1, infer_items / kBlocks);
    double fast_total = 0.0;
    double base_total = 0.0;
    for (std::size_t b = 0; b < kBlocks; ++b) {
      fast_total += per_item_us(block, fast_item);
      base_total += per_item_us(block, base_item);
    }
    sample.fastcar_infer_us = fast_total / kBlocks;
    sample.baseline_infer_us = base_total / kBlocks;
    report.runs.push_back(sample);
    train_ratios.push_back(sample.baseline_train_ms / sample.fastcar_train_ms);
    infer_ratios.push_back(sample.baseline_infer_us / sample.fastcar_infer_us);
  }
  auto collect = [&](auto member) {
    std::vector<double> values;
    for (const auto& r : report.runs) values.push_back(r.*member);
    return median(values);
  };
  report.fastcar_train_ms = collect(&TimingSample::fastcar_train_ms);
  report.baseline_train_ms = collect(&TimingSample::baseline_train_ms);
  report.fastcar_infer_us = collect(&TimingSample::fastcar_infer_us);
  report.baseline_infer_us = collect(&TimingSample::baseline_infer_us);
  report.train_ratio = report.baseline_train_ms / report.fastcar_train_ms;
  report.infer_ratio = report.baseline_infer_us / report.fastcar_infer_us;
  report.train_ratio_variance = variance(train_ratios);
  report.infer_ratio_variance = variance(infer_ratios);
  return report;
}

}  // namespace fastcar
