#include <gtest/gtest.h>

#include <filesystem>
#include <set>

#include "fastcar/data.hpp"
#include "fastcar/error.hpp"

using namespace fastcar;

namespace {

const std::filesystem::path kFixtures = FASTCAR_FIXTURE_DIR;

template <typename Fn>
Error error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected fastcar::Error";
  return Error(ErrorCode::InvalidArgument, "none");
}

SynthParams small_synth(std::size_t per_class = 70) {
  SynthParams p;
  p.per_class = per_class;
  return p;
}

}  // namespace

TEST(Csv, NamedClassesInFirstAppearanceOrder) {
  const auto ds = load_csv(kFixtures / "two_classes.csv");
  EXPECT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.n_classes(), 2u);
  EXPECT_EQ(ds.feature_dim(), 0u);
  EXPECT_EQ(ds.class_names(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(ds[0].class_index, 1);
  EXPECT_EQ(ds[1].class_index, 2);
  EXPECT_EQ(ds[2].class_index, 1);
  EXPECT_EQ(ds[1].property, 2.5);
}

TEST(Csv, IntegerClassesKeepNumericOrderAndFeatures) {
  const auto ds = load_csv(kFixtures / "numeric_classes.csv");
  EXPECT_EQ(ds.class_names(), (std::vector<std::string>{"1", "2"}));
  EXPECT_EQ(ds[0].class_index, 2);
  EXPECT_EQ(ds[1].class_index, 1);
  EXPECT_EQ(ds.feature_dim(), 2u);
  EXPECT_EQ(ds[2].features, (std::vector<double>{0.7, 3}));
}

TEST(Csv, ErrorsCarryLineNumbers) {
  const auto bad = error_of([] { load_csv(kFixtures / "bad_property.csv"); });
  EXPECT_EQ(bad.code(), ErrorCode::NonNumericProperty);
  EXPECT_EQ(bad.line(), 4u);

  const auto short_row = error_of([] { load_csv(kFixtures / "short_row.csv"); });
  EXPECT_EQ(short_row.code(), ErrorCode::MalformedRow);
  EXPECT_EQ(short_row.line(), 3u);

  EXPECT_EQ(error_of([] { load_csv(kFixtures / "wrong_header.csv"); }).code(),
            ErrorCode::MissingHeader);
  EXPECT_EQ(error_of([] { load_csv(kFixtures / "empty.csv"); }).code(),
            ErrorCode::EmptyFile);
  EXPECT_EQ(error_of([] { parse_csv("id,class,property\n"); }).code(),
            ErrorCode::EmptyFile);
  EXPECT_EQ(error_of([] { load_csv(kFixtures / "missing.csv"); }).code(),
            ErrorCode::Io);
}

TEST(Dataset, RejectsInconsistentRecords) {
  EXPECT_EQ(error_of([] {
              LabeledDataset({{"a", {1.0}, 1, 1.0}, {"b", {1.0, 2.0}, 2, 1.0}}, 2);
            }).code(),
            ErrorCode::DimMismatch);
  EXPECT_EQ(error_of([] { LabeledDataset({{"a", {}, 3, 1.0}}, 2); }).code(),
            ErrorCode::ClassOutOfRange);
}

TEST(Dataset, JsonLinesRoundTrip) {
  const auto ds = synth_generate(small_synth(10));
  const auto back = LabeledDataset::from_jsonl(ds.to_jsonl());
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_EQ(back[i].id, ds[i].id);
    EXPECT_EQ(back[i].class_index, ds[i].class_index);
    EXPECT_EQ(back[i].property, ds[i].property);
    EXPECT_EQ(back[i].features, ds[i].features);
  }
  EXPECT_EQ(back.to_jsonl(), ds.to_jsonl());
}

TEST(Synth, ShapeAndBalance) {
  SynthParams p;
  p.per_class = 100;
  const auto ds = synth_generate(p);
  EXPECT_EQ(ds.size(), 600u);
  EXPECT_EQ(ds.n_classes(), 6u);
  EXPECT_EQ(ds.feature_dim(), 16u);
  for (const auto c : ds.class_counts()) EXPECT_EQ(c, 100u);
  const auto intervals = default_synth_intervals(6);
  for (const auto& r : ds.records()) {
    EXPECT_TRUE(intervals.at(r.class_index).contains(r.property));
  }
}

TEST(Synth, SameSeedSameBytes) {
  const auto a = synth_generate(small_synth());
  const auto b = synth_generate(small_synth());
  EXPECT_EQ(a.to_jsonl(), b.to_jsonl());
  auto other = small_synth();
  other.seed = 8;
  EXPECT_NE(a.to_jsonl(), synth_generate(other).to_jsonl());
}

TEST(Synth, CentresRespectSeparation) {
  auto p = small_synth(10);
  p.cluster_sd = 0.0;
  p.separation = 6.0;
  const auto ds = synth_generate(p);
  std::vector<std::vector<double>> centres(6);
  for (const auto& r : ds.records()) {
    centres[r.class_index - 1].assign(r.features.begin(), r.features.end() - 1);
  }
  double closest = 1e300;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < centres[a].size(); ++j) {
        d2 += (centres[a][j] - centres[b][j]) * (centres[a][j] - centres[b][j]);
      }
      closest = std::min(closest, std::sqrt(d2));
    }
  }
  EXPECT_NEAR(closest, 6.0, 1e-9);
}

TEST(Synth, ValidatesParameters) {
  auto p = small_synth();
  p.intervals = {{0, 1}, {1, 2}};
  EXPECT_EQ(error_of([&] { synth_generate(p); }).code(), ErrorCode::IntervalCountMismatch);
  p = small_synth();
  p.n_classes = 1;
  EXPECT_EQ(error_of([&] { synth_generate(p); }).code(), ErrorCode::InvalidArgument);
  p = small_synth(9);
  EXPECT_EQ(error_of([&] { synth_generate(p); }).code(), ErrorCode::InvalidArgument);
}

TEST(Split, FiveOneOnePerClass) {
  const auto ds = synth_generate(small_synth(70));
  const auto s = split(ds, 7);
  EXPECT_EQ(s.train.size(), 300u);
  EXPECT_EQ(s.val.size(), 60u);
  EXPECT_EQ(s.test.size(), 60u);
}

TEST(Split, MinimumClassSize) {
  std::vector<Record> recs;
  for (int i = 0; i < 7; ++i) recs.push_back({"a" + std::to_string(i), {}, 1, 1.0});
  for (int i = 0; i < 6; ++i) recs.push_back({"b" + std::to_string(i), {}, 2, 1.0});
  const auto error = error_of([&] { split(LabeledDataset(recs, 2), 1); });
  EXPECT_EQ(error.code(), ErrorCode::ClassTooSmall);
  recs.push_back({"b6", {}, 2, 1.0});
  const auto s = split(LabeledDataset(recs, 2), 1);
  EXPECT_EQ(s.train.size(), 10u);
  EXPECT_EQ(s.val.size(), 2u);
  EXPECT_EQ(s.test.size(), 2u);
}

TEST(SplitProperty, PartitionAndBalance) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto p = small_synth(10 + seed * 3);
    p.seed = seed;
    const auto ds = synth_generate(p);
    const auto s = split(ds, seed);
    std::vector<int> seen(ds.size(), 0);
    for (const auto* part : {&s.train, &s.val, &s.test}) {
      for (const auto i : *part) ++seen[i];
    }
    for (const int count : seen) ASSERT_EQ(count, 1);

    const double expected = static_cast<double>(p.per_class) / 7.0;
    for (int c = 1; c <= 6; ++c) {
      std::size_t val = 0, test = 0;
      for (const auto i : s.val) val += ds[i].class_index == c;
      for (const auto i : s.test) test += ds[i].class_index == c;
      EXPECT_LE(std::abs(static_cast<double>(val) - expected), 1.0);
      EXPECT_LE(std::abs(static_cast<double>(test) - expected), 1.0);
      EXPECT_EQ(val, test);
    }
    EXPECT_EQ(s.train, split(ds, seed).train);
  }
}

TEST(ClassIntervalsFromData, UsesOnlySelectedRecords) {
  const auto ds = load_csv(FASTCAR_FIXTURE_DIR "/overlap_pair.csv");
  const std::vector<std::size_t> all{0, 1, 2, 3};
  const auto iv = class_intervals(ds, all);
  EXPECT_EQ(iv.at(1), (Interval{0, 10}));
  EXPECT_EQ(iv.at(2), (Interval{5, 15}));
  const std::vector<std::size_t> first_only{0, 1};
  EXPECT_EQ(error_of([&] { class_intervals(ds, first_only); }).code(),
            ErrorCode::InvalidArgument);
}
