#include "fastcar/labelspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fastcar/error.hpp"

namespace fastcar {

ClassIntervals::ClassIntervals(std::vector<Interval> bounds)
    : bounds_(std::move(bounds)) {
  if (bounds_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "at least one class is required");
  }
  for (std::size_t i = 0; i < bounds_.size(); ++i) {
    const auto& b = bounds_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      std::ostringstream msg;
      msg << "class " << i + 1 << " has bounds [" << b.lo << ", " << b.hi
          << "]";
      throw Error(ErrorCode::DegenerateIntervals, msg.str());
    }
  }
}

const Interval& ClassIntervals::at(int class_index) const {
  if (class_index < 1 || static_cast<std::size_t>(class_index) > size()) {
    throw Error(ErrorCode::ClassOutOfRange,
                "class " + std::to_string(class_index) + " not in 1.." +
                    std::to_string(size()));
  }
  return bounds_[static_cast<std::size_t>(class_index - 1)];
}

double ClassIntervals::max_width() const noexcept {
  double widest = 0.0;
  for (const auto& b : bounds_) widest = std::max(widest, b.width());
  return widest;
}

std::string to_string(SpacingMode mode) {
  return mode == SpacingMode::PaperExact ? "paper_exact" : "strict_spacing";
}

SpacingMode spacing_mode_from_string(const std::string& text) {
  if (text == "paper_exact" || text == "paper") return SpacingMode::PaperExact;
  if (text == "strict_spacing" || text == "strict") {
    return SpacingMode::StrictSpacing;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown spacing mode '" + text +
                                              "' (expected paper_exact or "
                                              "strict_spacing)");
}

void TransformConfig::validate() const {
  const bool ok = mode == SpacingMode::PaperExact ? (u >= 1.0 && u <= 2.0)
                                                  : (u > 1.0 && u < 2.0);
  if (!ok || !std::isfinite(u)) {
    std::ostringstream msg;
    msg << "u=" << u << " outside "
        << (mode == SpacingMode::PaperExact ? "[1, 2]" : "(1, 2)") << " for "
        << to_string(mode);
    throw Error(ErrorCode::InvalidU, msg.str());
  }
}

namespace {

std::vector<double> paper_offsets(const ClassIntervals& intervals, double u,
                                  double delta) {
  std::vector<double> k(intervals.size());
  for (std::size_t i = 0; i < k.size(); ++i) {
    k[i] = static_cast<double>(i) * (u * delta);
  }
  return k;
}

// Places a_{i+1} + k_{i+1} exactly u*delta above b_i + k_i.
std::vector<double> strict_offsets(const ClassIntervals& intervals, double u,
                                   double delta) {
  const auto b = intervals.bounds();
  std::vector<double> k(b.size(), 0.0);
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    k[i + 1] = k[i] + (b[i].hi - b[i + 1].lo) + u * delta;
  }
  return k;
}

double centering_shift(const ClassIntervals& intervals,
                       std::span<const double> offsets, SpacingMode mode) {
  double lowest = std::numeric_limits<double>::infinity();
  double highest = -std::numeric_limits<double>::infinity();
  const auto b = intervals.bounds();
  for (std::size_t i = 0; i < b.size(); ++i) {
    lowest = std::min(lowest, b[i].lo + offsets[i]);
    highest = std::max(highest, b[i].hi + offsets[i]);
  }
  // The literal form subtracts half the span, which is only symmetric when
  // the lowest transformed bound sits at zero.
  if (mode == SpacingMode::PaperExact) return 0.5 * (highest - lowest);
  return 0.5 * (highest + lowest);
}

}  // namespace

HybridLabelCodec::HybridLabelCodec(ClassIntervals intervals,
                                   TransformConfig config,
                                   std::vector<double> offsets, double shift)
    : intervals_(std::move(intervals)),
      config_(config),
      delta_(intervals_.max_width()),
      offsets_(std::move(offsets)),
      shift_(shift) {
  transformed_.reserve(intervals_.size());
  const auto b = intervals_.bounds();
  for (std::size_t i = 0; i < b.size(); ++i) {
    // Same evaluation order as encode() so interval membership is exact.
    transformed_.push_back({b[i].lo + offsets_[i] - shift_,
                            b[i].hi + offsets_[i] - shift_});
  }
}

HybridLabelCodec HybridLabelCodec::fit(const ClassIntervals& intervals,
                                       const TransformConfig& config) {
  config.validate();
  double delta = intervals.max_width();
  std::vector<double> offsets;
  if (config.mode == SpacingMode::PaperExact) {
    offsets = paper_offsets(intervals, config.u, delta);
  } else {
    if (delta == 0.0) delta = kMinimumSpacingDelta;
    offsets = strict_offsets(intervals, config.u, delta);
  }
  const double shift =
      config.centering ? centering_shift(intervals, offsets, config.mode) : 0.0;
  return HybridLabelCodec(intervals, config, std::move(offsets), shift);
}

HybridLabelCodec make_bad_codec(const ClassIntervals& intervals,
                                bool centering) {
  const auto b = intervals.bounds();
  bool any_overlap = false;
  for (std::size_t p = 0; p < b.size() && !any_overlap; ++p) {
    for (std::size_t q = p + 1; q < b.size(); ++q) {
      if (b[p].intersects(b[q])) {
        any_overlap = true;
        break;
      }
    }
  }
  if (!any_overlap) {
    throw Error(ErrorCode::NoOverlapPossible,
                "class intervals are pairwise disjoint; zero offsets cannot "
                "produce colliding labels");
  }
  TransformConfig config{1.0, centering, SpacingMode::PaperExact};
  std::vector<double> offsets(b.size(), 0.0);
  const double shift =
      centering ? centering_shift(intervals, offsets, config.mode) : 0.0;
  return HybridLabelCodec(intervals, config, std::move(offsets), shift);
}

double HybridLabelCodec::spacing_delta() const noexcept {
  if (config_.mode == SpacingMode::StrictSpacing && delta_ == 0.0) {
    return kMinimumSpacingDelta;
  }
  return delta_;
}

void HybridLabelCodec::check_class(int class_index) const {
  if (class_index < 1 || static_cast<std::size_t>(class_index) > size()) {
    throw Error(ErrorCode::ClassOutOfRange,
                "class " + std::to_string(class_index) + " not in 1.." +
                    std::to_string(size()));
  }
}

double HybridLabelCodec::offset(int class_index) const {
  check_class(class_index);
  return offsets_[static_cast<std::size_t>(class_index - 1)];
}

const Interval& HybridLabelCodec::transformed(int class_index) const {
  check_class(class_index);
  return transformed_[static_cast<std::size_t>(class_index - 1)];
}

double HybridLabelCodec::encode_unchecked(int class_index,
                                          double property) const {
  check_class(class_index);
  if (!std::isfinite(property)) {
    throw Error(ErrorCode::NonFiniteInput, "property is not finite");
  }
  return property + offsets_[static_cast<std::size_t>(class_index - 1)] -
         shift_;
}

double HybridLabelCodec::encode(int class_index, double property) const {
  const Interval& range = intervals_.at(class_index);
  if (std::isfinite(property) && !range.contains(property)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "property " << property << " outside [" << range.lo << ", "
        << range.hi << "] of class " << class_index;
    throw Error(ErrorCode::PropertyOutOfInterval, msg.str());
  }
  return encode_unchecked(class_index, property);
}

Decoded HybridLabelCodec::decode(double hybrid) const {
  if (!std::isfinite(hybrid)) {
    throw Error(ErrorCode::NonFiniteInput, "prediction is not finite");
  }
  std::size_t best = 0;
  double best_distance = transformed_[0].distance_to(hybrid);
  for (std::size_t i = 1; i < transformed_.size(); ++i) {
    const double d = transformed_[i].distance_to(hybrid);
    if (d < best_distance) {
      best = i;
      best_distance = d;
    }
  }
  const Interval& slot = transformed_[best];
  const Interval& range = intervals_.bounds()[best];
  Decoded out;
  out.class_index = static_cast<int>(best) + 1;
  if (hybrid < slot.lo) {
    out.property = range.lo;
    out.clamped = true;
  } else if (hybrid > slot.hi) {
    out.property = range.hi;
    out.clamped = true;
  } else {
    // Rounding can land one ulp past a bound; the slot test above is exact.
    out.property =
        std::clamp(hybrid - offsets_[best] + shift_, range.lo, range.hi);
  }
  return out;
}

void HybridLabelCodec::set_class_names(std::vector<std::string> names) {
  if (!names.empty() && names.size() != size()) {
    throw Error(ErrorCode::IntervalCountMismatch,
                std::to_string(names.size()) + " class names for " +
                    std::to_string(size()) + " classes");
  }
  class_names_ = std::move(names);
}

namespace {

nlohmann::json pairs_to_json(std::span<const Interval> bounds) {
  auto out = nlohmann::json::array();
  for (const auto& b : bounds) out.push_back({b.lo, b.hi});
  return out;
}

}  // namespace

nlohmann::json HybridLabelCodec::to_json() const {
  nlohmann::json doc;
  doc["n"] = size();
  doc["u"] = config_.u;
  doc["mode"] = to_string(config_.mode);
  doc["centering"] = config_.centering;
  doc["delta"] = delta_;
  doc["offsets"] = offsets_;
  doc["shift"] = shift_;
  doc["bounds"] = pairs_to_json(intervals_.bounds());
  doc["transformed_bounds"] = pairs_to_json(transformed_);
  if (!class_names_.empty()) doc["class_names"] = class_names_;
  return doc;
}

HybridLabelCodec HybridLabelCodec::from_json(const nlohmann::json& doc) {
  try {
    std::vector<Interval> bounds;
    for (const auto& pair : doc.at("bounds")) {
      if (!pair.is_array() || pair.size() != 2) {
        throw Error(ErrorCode::Parse, "bounds entries must be [a, b] pairs");
      }
      bounds.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    ClassIntervals intervals(std::move(bounds));
    TransformConfig config;
    config.u = doc.at("u").get<double>();
    config.centering = doc.at("centering").get<bool>();
    config.mode = spacing_mode_from_string(doc.at("mode").get<std::string>());
    auto offsets = doc.at("offsets").get<std::vector<double>>();
    const double shift = doc.at("shift").get<double>();
    if (doc.at("n").get<std::size_t>() != intervals.size() ||
        offsets.size() != intervals.size()) {
      throw Error(ErrorCode::Parse, "n, bounds and offsets disagree in length");
    }
    HybridLabelCodec codec(std::move(intervals), config, std::move(offsets),
                           shift);
    if (doc.contains("class_names")) {
      codec.set_class_names(doc["class_names"].get<std::vector<std::string>>());
    }
    return codec;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("codec document: ") + e.what());
  }
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Overlap: return "overlap";
    case ViolationKind::Ordering: return "ordering";
    case ViolationKind::GapTooSmall: return "gap_too_small";
    case ViolationKind::GapTooLarge: return "gap_too_large";
  }
  return "unknown";
}

std::size_t SpacingReport::count(ViolationKind kind) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [kind](const auto& v) { return v.kind == kind; }));
}

nlohmann::json SpacingReport::to_json() const {
  nlohmann::json doc;
  doc["verdict"] = good() ? "good" : "bad";
  doc["delta"] = delta;
  doc["gaps"] = gaps;
  auto list = nlohmann::json::array();
  for (const auto& v : violations) {
    list.push_back({{"kind", to_string(v.kind)},
                    {"classes", {v.first_class, v.second_class}},
                    {"value", v.value}});
  }
  doc["violations"] = std::move(list);
  return doc;
}

std::string SpacingReport::render() const {
  std::ostringstream out;
  out.precision(15);
  out << "spacing verdict: " << (good() ? "Good" : "Bad") << " (delta "
      << delta << ", " << violations.size() << " violation(s))\n";
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    out << "  gap " << i + 1 << "->" << i + 2 << ": " << gaps[i] << "\n";
  }
  for (const auto& v : violations) {
    out << "  " << to_string(v.kind) << " between classes " << v.first_class
        << " and " << v.second_class << ": " << v.value << "\n";
  }
  return out.str();
}

SpacingReport validate_spacing(const HybridLabelCodec& codec) {
  SpacingReport report;
  report.delta = codec.spacing_delta();
  const auto s = codec.transformed_bounds();
  const int n = static_cast<int>(s.size());

  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      if (s[p].intersects(s[q])) {
        const double overlap =
            std::min(s[p].hi, s[q].hi) - std::max(s[p].lo, s[q].lo);
        report.violations.push_back(
            {ViolationKind::Overlap, p + 1, q + 1, overlap});
      }
    }
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double gap = s[i + 1].lo - s[i].hi;
    report.gaps.push_back(gap);
    if (!(s[i].hi < s[i + 1].lo)) {
      report.violations.push_back({ViolationKind::Ordering, i + 1, i + 2, gap});
    }
    if (!(gap > report.delta)) {
      report.violations.push_back(
          {ViolationKind::GapTooSmall, i + 1, i + 2, gap});
    } else if (!(gap < 2.0 * report.delta)) {
      report.violations.push_back(
          {ViolationKind::GapTooLarge, i + 1, i + 2, gap});
    }
  }
  return report;
}

}  // namespace fastcar
