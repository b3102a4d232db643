#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "fastcar/error.hpp"
#include "fastcar/metrics.hpp"

using namespace fastcar;

namespace {

using Ints = std::vector<int>;
using Reals = std::vector<double>;

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected fastcar::Error";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Accuracy, CountsExactMatches) {
  EXPECT_EQ(accuracy(Ints{1, 2, 3}, Ints{1, 2, 3}), 1.0);
  EXPECT_EQ(accuracy(Ints{1, 2, 3, 4}, Ints{1, 2, 3, 1}), 0.75);
  EXPECT_EQ(accuracy(Ints{1}, Ints{2}), 0.0);
}

TEST(Mse, HandValues) {
  EXPECT_EQ(mse(Reals{1, 2}, Reals{1, 2}), 0.0);
  EXPECT_EQ(mse(Reals{0, 0}, Reals{3, 4}), 12.5);
  EXPECT_EQ(mse(Reals{5}, Reals{2}), 9.0);
  EXPECT_EQ(mae(Reals{0, 0}, Reals{3, 4}), 3.5);
}

TEST(Mape, IsAFraction) {
  EXPECT_DOUBLE_EQ(mape(Reals{100, 200}, Reals{102, 196}), 0.02);
  EXPECT_EQ(mape(Reals{7, 9}, Reals{7, 9}), 0.0);
  EXPECT_EQ(code_of([] { mape(Reals{0}, Reals{1}); }), ErrorCode::ZeroTrueValue);
}

TEST(Metrics, ShapeErrors) {
  EXPECT_EQ(code_of([] { accuracy(Ints{1, 2}, Ints{1}); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { accuracy(Ints{}, Ints{}); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { mse(Reals{1}, Reals{}); }), ErrorCode::LengthMismatch);
  EXPECT_EQ(code_of([] { mae(Reals{}, Reals{}); }), ErrorCode::EmptyInput);
  EXPECT_EQ(code_of([] { mape(Reals{}, Reals{}); }), ErrorCode::EmptyInput);
}

TEST(EvalReport, JsonKeysCarryUnits) {
  EvalReport r;
  r.model = "fastcar";
  r.accuracy = 0.5;
  r.mse = 2.0;
  r.mape = 0.1;
  r.n_samples = 4;
  r.wall_train_ms = 12.0;
  const auto doc = r.to_json();
  EXPECT_EQ(doc.at("accuracy_fraction"), 0.5);
  EXPECT_EQ(doc.at("mse_raw"), 2.0);
  EXPECT_EQ(doc.at("mape_fraction"), 0.1);
  EXPECT_FALSE(doc.contains("wall_train_ms"));
  EXPECT_EQ(r.to_json(true).at("wall_train_ms"), 12.0);
}

TEST(MetricsProperty, IdentityPermutationAndJensen) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(-100.0, 100.0);
  std::uniform_int_distribution<int> cls(1, 5);
  std::uniform_int_distribution<std::size_t> length(1, 50);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = length(rng);
    Reals t(n), p(n);
    Ints tc(n), pc(n);
    for (std::size_t i = 0; i < n; ++i) {
      t[i] = value(rng);
      if (t[i] == 0.0) t[i] = 1.0;
      p[i] = value(rng);
      tc[i] = cls(rng);
      pc[i] = cls(rng);
    }
    EXPECT_EQ(mse(t, t), 0.0);
    EXPECT_EQ(mae(t, t), 0.0);
    EXPECT_EQ(mape(t, t), 0.0);
    EXPECT_LE(mae(t, p), std::sqrt(mse(t, p)) * (1 + 1e-12));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Reals t2(n), p2(n);
    Ints tc2(n), pc2(n);
    for (std::size_t i = 0; i < n; ++i) {
      t2[i] = t[order[i]];
      p2[i] = p[order[i]];
      tc2[i] = tc[order[i]];
      pc2[i] = pc[order[i]];
    }
    EXPECT_NEAR(mse(t, p), mse(t2, p2), 1e-9 * (1 + mse(t, p)));
    EXPECT_NEAR(mape(t, p), mape(t2, p2), 1e-9 * (1 + mape(t, p)));
    EXPECT_EQ(accuracy(tc, pc), accuracy(tc2, pc2));
    const double a = accuracy(tc, pc);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
}
