#pragma once

// Hybrid label codec: folds a class index and a scalar property into one real
// number by shifting every class's property interval to its own slot on the
// real line, and inverts that mapping for model predictions.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace fastcar {

// Closed interval [lo, hi] in property units.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  bool intersects(const Interval& other) const noexcept {
    return lo <= other.hi && other.lo <= hi;
  }
  // Zero inside the interval, otherwise the distance to the nearest bound.
  double distance_to(double x) const noexcept {
    if (x < lo) return lo - x;
    if (x > hi) return x - hi;
    return 0.0;
  }

  friend bool operator==(const Interval&, const Interval&) = default;
};

// Per-class property ranges. Class indices are 1-based and positional.
class ClassIntervals {
 public:
  // Throws DegenerateIntervals if any lo > hi (or a bound is not finite),
  // InvalidArgument when empty.
  explicit ClassIntervals(std::vector<Interval> bounds);

  std::size_t size() const noexcept { return bounds_.size(); }
  const Interval& at(int class_index) const;
  std::span<const Interval> bounds() const noexcept { return bounds_; }
  double max_width() const noexcept;

  friend bool operator==(const ClassIntervals&, const ClassIntervals&) = default;

 private:
  std::vector<Interval> bounds_;
};

enum class SpacingMode {
  // k_i = (i - 1) * u * delta, centering by half the transformed span.
  PaperExact,
  // Every inter-class gap is exactly u * delta; centering about the midpoint.
  StrictSpacing,
};

std::string to_string(SpacingMode mode);
SpacingMode spacing_mode_from_string(const std::string& text);

struct TransformConfig {
  double u = 1.5;
  bool centering = true;
  SpacingMode mode = SpacingMode::PaperExact;

  // PaperExact accepts 1 <= u <= 2, StrictSpacing needs 1 < u < 2.
  void validate() const;
};

// Unit of gap used by StrictSpacing when every class is point-valued.
inline constexpr double kMinimumSpacingDelta = 1.0;

struct Decoded {
  int class_index = 0;
  double property = 0.0;
  // The prediction fell outside every transformed interval and the property
  // was pulled back to the nearest bound of the decoded class.
  bool clamped = false;
};

class HybridLabelCodec {
 public:
  static HybridLabelCodec fit(const ClassIntervals& intervals,
                              const TransformConfig& config);

  // property + k_i - shift. Throws ClassOutOfRange / PropertyOutOfInterval /
  // NonFiniteInput.
  double encode(int class_index, double property) const;

  // Same arithmetic as encode() without the interval check; used for held-out
  // records whose property lies outside the training-derived range.
  double encode_unchecked(int class_index, double property) const;

  // Nearest transformed interval, ties to the lower class index.
  Decoded decode(double hybrid) const;

  std::size_t size() const noexcept { return intervals_.size(); }
  const ClassIntervals& intervals() const noexcept { return intervals_; }
  const TransformConfig& config() const noexcept { return config_; }
  double delta() const noexcept { return delta_; }
  // Delta used for gap sizing; differs from delta() only for a point-valued
  // StrictSpacing codec.
  double spacing_delta() const noexcept;
  std::span<const double> offsets() const noexcept { return offsets_; }
  double offset(int class_index) const;
  double shift() const noexcept { return shift_; }
  std::span<const Interval> transformed_bounds() const noexcept {
    return transformed_;
  }
  const Interval& transformed(int class_index) const;

  const std::vector<std::string>& class_names() const noexcept {
    return class_names_;
  }
  // Optional labels carried through serialization for CSV tooling.
  void set_class_names(std::vector<std::string> names);

  nlohmann::json to_json() const;
  static HybridLabelCodec from_json(const nlohmann::json& doc);

 private:
  HybridLabelCodec(ClassIntervals intervals, TransformConfig config,
                   std::vector<double> offsets, double shift);

  void check_class(int class_index) const;

  friend HybridLabelCodec make_bad_codec(const ClassIntervals&, bool);

  ClassIntervals intervals_;
  TransformConfig config_;
  double delta_ = 0.0;
  std::vector<double> offsets_;
  double shift_ = 0.0;
  std::vector<Interval> transformed_;
  std::vector<std::string> class_names_;
};

// Ablation-only codec with every offset at zero, so overlapping class
// intervals collide in the hybrid space. Throws NoOverlapPossible when the
// intervals are already pairwise disjoint.
HybridLabelCodec make_bad_codec(const ClassIntervals& intervals,
                                bool centering = false);

enum class ViolationKind {
  Overlap,        // two transformed intervals intersect
  Ordering,       // S_i is not entirely below S_{i+1}
  GapTooSmall,    // gap <= delta
  GapTooLarge,    // gap >= 2 * delta
};

std::string to_string(ViolationKind kind);

struct SpacingViolation {
  ViolationKind kind;
  int first_class;
  int second_class;
  double value;  // gap for spacing/ordering, overlap length for Overlap
};

struct SpacingReport {
  double delta = 0.0;
  // gaps[j]: lower bound of class j+2 minus upper bound of class j+1.
  std::vector<double> gaps;
  std::vector<SpacingViolation> violations;

  bool good() const noexcept { return violations.empty(); }
  std::size_t count(ViolationKind kind) const noexcept;
  nlohmann::json to_json() const;
  std::string render() const;
};

SpacingReport validate_spacing(const HybridLabelCodec& codec);

}  // namespace fastcar
