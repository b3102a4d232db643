#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fastcar/labelspace.hpp"

namespace fastcar {

struct Record {
  std::string id;
  std::vector<double> features;
  int class_index = 0;  // 1-based
  double property = 0.0;
};

// Records with a fixed feature dimension and dense class indices 1..n.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Validates dimensions and class density. `class_names`, when given, maps
  // index i to class_names[i - 1].
  LabeledDataset(std::vector<Record> records, std::size_t n_classes,
                 std::vector<std::string> class_names = {});

  std::span<const Record> records() const noexcept { return records_; }
  const Record& operator[](std::size_t i) const { return records_.at(i); }
  std::size_t size() const noexcept { return records_.size(); }
  std::size_t n_classes() const noexcept { return n_classes_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  std::vector<std::size_t> class_counts() const;

  // One JSON object per line: {id, class_index, property, features}.
  std::string to_jsonl() const;
  static LabeledDataset from_jsonl(const std::string& text);

 private:
  std::vector<Record> records_;
  std::size_t n_classes_ = 0;
  std::size_t feature_dim_ = 0;
  std::vector<std::string> class_names_;
};

// Header `id,class,property` followed by optional numeric feature columns.
// All-integer class columns keep their numeric order; named classes are
// indexed by first appearance.
LabeledDataset load_csv(const std::filesystem::path& path);
LabeledDataset parse_csv(const std::string& text);

void save_jsonl(const LabeledDataset& dataset,
                const std::filesystem::path& path);
LabeledDataset load_jsonl(const std::filesystem::path& path);

struct SynthParams {
  std::size_t n_classes = 6;
  std::size_t per_class = 140;
  std::size_t feature_dim = 16;
  double separation = 6.0;
  double noise_sd = 0.1;
  // Per-coordinate standard deviation of each class cluster.
  double cluster_sd = 0.25;
  std::uint64_t seed = 7;
  // Empty means default_synth_intervals(n_classes).
  std::vector<Interval> intervals;
};

// Heavily overlapping per-class property ranges, so the zero-offset ablation
// codec has collisions to expose.
ClassIntervals default_synth_intervals(std::size_t n_classes);

// Gaussian class clusters (cluster_sd per coordinate, centres at least `separation`
// apart) in the first d-1 coordinates; the last coordinate carries the
// property plus N(0, noise_sd) noise.
LabeledDataset synth_generate(const SynthParams& params);

struct SplitAssignment {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

// Per-class 5:1:1 after a seeded shuffle; the rounding remainder goes to
// train. Throws ClassTooSmall when a class has fewer than 7 records.
SplitAssignment split(const LabeledDataset& dataset, std::uint64_t seed);

// Min/max property per class over `indices`. Throws InvalidArgument when a
// class has no record among them.
ClassIntervals class_intervals(const LabeledDataset& dataset,
                               std::span<const std::size_t> indices);

}  // namespace fastcar
