#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fastcar/labelspace.hpp"

namespace fastcar::support {

// n in [1, 20], widths in [0, 1e3] (about one in ten point-valued), lower
// bounds in [-1e6, 1e6 - 1e3].
inline ClassIntervals random_intervals(std::mt19937_64& rng,
                                       std::size_t max_classes = 20) {
  std::uniform_int_distribution<std::size_t> count(1, max_classes);
  std::uniform_real_distribution<double> lower(-1e6, 1e6 - 1e3);
  std::uniform_real_distribution<double> width(0.0, 1e3);
  std::bernoulli_distribution point(0.1);
  const std::size_t n = count(rng);
  std::vector<Interval> bounds;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = lower(rng);
    bounds.push_back({a, a + (point(rng) ? 0.0 : width(rng))});
  }
  return ClassIntervals(std::move(bounds));
}

// u strictly inside (1, 2).
inline double random_open_u(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(std::nextafter(1.0, 2.0), 2.0);
  return dist(rng);
}

inline double random_point(std::mt19937_64& rng, const Interval& b) {
  std::uniform_real_distribution<double> t(0.0, 1.0);
  const double p = b.lo + t(rng) * (b.hi - b.lo);
  return std::clamp(p, b.lo, b.hi);
}

}  // namespace fastcar::support
