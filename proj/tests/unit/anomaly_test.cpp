// Copyright 2026 The kpiroot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "kpiroot/anomaly.hpp"
#include "kpiroot/error.hpp"
#include "kpiroot/evaluation.hpp"
#include "kpiroot/series.hpp"

namespace kpiroot {
namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

std::vector<std::size_t> sorted_subset(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution pick(p);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (pick(rng)) out.push_back(i);
  }
  return out;
}

TEST(TrendRatio, ConstantSeriesIsOne) {
  const std::vector<double> p(20, 3.0);
  const auto r = trend_ratio_scores(p, 4);
  for (std::size_t i = 4; i + 4 <= p.size(); ++i) EXPECT_DOUBLE_EQ(r[i], 1.0);
}

TEST(TrendRatio, StepUpExample) {
  const std::vector<double> p{1, 1, 1, 3, 3, 3};
  EXPECT_DOUBLE_EQ(trend_ratio_scores(p, 3)[3], 3.0);
}

TEST(TrendRatio, StepDownByHalf) {
  const std::vector<double> p{2, 2, 2, 1, 1, 1};
  EXPECT_DOUBLE_EQ(trend_ratio_scores(p, 3)[3], 0.5);
}

TEST(TrendRatio, UndefinedBeforeFirstFullWindow) {
  const std::vector<double> p{1, 2, 3, 4, 5, 6, 7, 8};
  const auto r = trend_ratio_scores(p, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(std::isnan(r[i]));
  for (std::size_t i = 3; i + 3 <= p.size(); ++i) EXPECT_TRUE(std::isfinite(r[i]));
}

TEST(TrendRatio, RejectsWindowLongerThanHalf) {
  const std::vector<double> p(9, 1.0);
  EXPECT_THROW(trend_ratio_scores(p, 5), ParameterError);
  EXPECT_THROW(trend_ratio_scores(p, 0), ParameterError);
}

TEST(TrendRatio, InvariantToConstantOffset) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto p = gaussian(60, seed);
    auto q = p;
    for (auto& v : q) v += 17.5 * static_cast<double>(seed) - 200.0;
    const auto a = trend_ratio_scores(p, 5);
    const auto b = trend_ratio_scores(q, 5);
    for (std::size_t i = 5; i + 5 <= p.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9);
  }
}

TEST(TrendOverload, FlatSeriesIsQuiet) {
  const std::vector<double> p(60, 2.0);
  EXPECT_TRUE(detect_trend_overload(p, 2.0, 5).empty());
}

TEST(TrendOverload, SustainedStepStaysOpen) {
  std::vector<double> p(60, 1.0);
  for (std::size_t i = 20; i < 60; ++i) p[i] = 5.0;
  const auto segs = detect_trend_overload(p, 2.0, 5);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_GE(segs[0].start, 20u);
  EXPECT_LE(segs[0].start, 24u);
  EXPECT_EQ(segs[0].end, 60u);
  EXPECT_EQ(segs[0].kind, SegmentKind::trend);
}

TEST(TrendOverload, SpikeClosesWhenLevelDropsBelowStart) {
  std::vector<double> p(60, 1.0);
  for (std::size_t i = 20; i < 25; ++i) p[i] = 5.0;
  for (std::size_t i = 25; i < 60; ++i) p[i] = 0.5;
  const auto segs = detect_trend_overload(p, 2.0, 5);
  ASSERT_GE(segs.size(), 1u);
  EXPECT_EQ(segs[0].start, 20u);
  EXPECT_EQ(segs[0].end, 25u);
}

TEST(TrendOverload, SegmentsOrderedAndDisjoint) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto p = gaussian(80, seed);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pos(5, 75);
    for (int k = 0; k < 4; ++k) {
      const int at = pos(rng);
      for (int i = at; i < std::min(80, at + 3); ++i) p[i] += 6.0;
    }
    const auto segs = detect_trend_overload(p, 2.0, 5);
    for (std::size_t i = 0; i < segs.size(); ++i) {
      EXPECT_LT(segs[i].start, segs[i].end);
      EXPECT_LE(segs[i].end, p.size());
      if (i > 0) {
        EXPECT_LE(segs[i - 1].end, segs[i].start);
      }
    }
  }
}

TEST(RobustSigma, GaussianTailFraction) {
  const auto x = gaussian(10000, 99);
  const auto flagged = robust_sigma_detect(x, 3.0);
  const double fraction = static_cast<double>(flagged.size()) / x.size();
  EXPECT_NEAR(fraction, 0.0027, 0.002);
}

TEST(RobustSigma, ConstantSeriesIsQuiet) {
  const std::vector<double> x(100, 1.5);
  EXPECT_TRUE(robust_sigma_detect(x).empty());
}

TEST(RobustSigma, FlagsInjectedOutlier) {
  auto x = gaussian(2000, 5);
  x[1234] += 10.0;
  const auto flagged = robust_sigma_detect(x, 3.0);
  EXPECT_TRUE(std::binary_search(flagged.begin(), flagged.end(), 1234u));
}

TEST(RobustSigma, ZeroMadFallsBackToMedianDifference) {
  std::vector<double> x(11, 2.0);
  x[3] = 2.001;
  x[8] = -4.0;
  EXPECT_EQ(robust_sigma_detect(x), (std::vector<std::size_t>{3, 8}));
}

TEST(RobustSigma, RejectsTinyInput) {
  const std::vector<double> x{1.0, 2.0};
  EXPECT_THROW(robust_sigma_detect(x), ParameterError);
}

TEST(Fusion, EmptyInputs) {
  EXPECT_TRUE(fuse_anomaly_indices({}, {}, {}).empty());
}

TEST(Fusion, DisjointUnion) {
  const std::vector<std::size_t> a{1}, b{5}, c{9};
  EXPECT_EQ(fuse_anomaly_indices(a, b, c), (std::vector<std::size_t>{1, 5, 9}));
}

TEST(Fusion, OverlapsAreDeduplicatedAndSorted) {
  const std::vector<std::size_t> a{7, 2, 3}, b{3, 4}, c{2, 9};
  EXPECT_EQ(fuse_anomaly_indices(a, b, c), (std::vector<std::size_t>{2, 3, 4, 7, 9}));
}

TEST(Fusion, MapsSamplesToPaaSegments) {
  const std::vector<double> x(12, 0.0);
  const auto p = paa(x, 4);  // segments of 3 samples
  const std::vector<std::size_t> a{0, 1}, b{7}, c{11};
  EXPECT_EQ(fuse_anomaly_indices(a, b, c, p), (std::vector<std::size_t>{0, 2, 3}));
}

TEST(Fusion, UnionDominatesEveryComponent) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 300;
    const auto a = sorted_subset(n, 0.05, rng);
    const auto b = sorted_subset(n, 0.02, rng);
    const auto c = sorted_subset(n, 0.1, rng);
    const auto fused = fuse_anomaly_indices(a, b, c);
    for (const auto* part : {&a, &b, &c}) {
      EXPECT_TRUE(std::includes(fused.begin(), fused.end(), part->begin(), part->end()));
    }
    std::vector<LabelWindow> labels{{20, 60}, {100, 110}, {200, 260}};
    const double fused_recall = point_adjusted_f1(fused, labels).recall;
    for (const auto* part : {&a, &b, &c}) {
      EXPECT_GE(fused_recall, point_adjusted_f1(*part, labels).recall);
    }
  }
}

TEST(Segments, ContiguousRun) {
  const std::vector<std::size_t> idx{3, 4, 5};
  const auto segs = segments_from_indices(idx, 1);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].start, 3u);
  EXPECT_EQ(segs[0].end, 6u);
  EXPECT_EQ(segs[0].kind, SegmentKind::fused);
}

TEST(Segments, GapTooWideSplits) {
  const std::vector<std::size_t> idx{3, 7};
  EXPECT_EQ(segments_from_indices(idx, 1).size(), 2u);
}

TEST(Segments, GapWithinToleranceMerges) {
  const std::vector<std::size_t> idx{3, 5};
  const auto segs = segments_from_indices(idx, 2);
  ASSERT_EQ(segs.size(), 1u);
  EXPECT_EQ(segs[0].start, 3u);
  EXPECT_EQ(segs[0].end, 6u);
}

TEST(Segments, RejectsUnsortedIndices) {
  const std::vector<std::size_t> idx{5, 3};
  EXPECT_THROW(segments_from_indices(idx, 2), ParameterError);
}

TEST(Segments, ExtensionMeetsMinimumWithinBounds) {
  std::mt19937_64 rng(31);
  for (std::size_t q : {1u, 2u, 3u, 5u}) {
    const std::size_t min_len = 2 * q + 2;
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t w = 20 + trial % 60;
      const auto idx = sorted_subset(w, 0.08, rng);
      const auto segs = segments_from_indices(idx, 2, min_len, w);
      for (std::size_t i = 0; i < segs.size(); ++i) {
        EXPECT_LT(segs[i].start, segs[i].end);
        EXPECT_LE(segs[i].end, w);
        EXPECT_GE(segs[i].size(), min_len);
        if (i > 0) {
          EXPECT_LT(segs[i - 1].end, segs[i].start);
        }
      }
      // Every input index stays covered.
      for (std::size_t v : idx) {
        const bool covered = std::any_of(segs.begin(), segs.end(), [&](const AnomalySegment& s) {
          return s.start <= v && v < s.end;
        });
        EXPECT_TRUE(covered);
      }
    }
  }
}

TEST(Segments, SamplesCoverSegmentBounds) {
  const std::vector<double> x(20, 0.0);
  const auto p = paa(x, 5);  // 4 samples each
  const std::vector<AnomalySegment> segs{{1, 3, SegmentKind::fused, 0.0}};
  const auto samples = segment_samples(segs, p);
  ASSERT_EQ(samples.size(), 8u);
  EXPECT_EQ(samples.front(), 4u);
  EXPECT_EQ(samples.back(), 11u);
}

TEST(DetectorConfig, Validation) {
  DetectorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = DetectorConfig{};
  cfg.window_length = 3;
  EXPECT_THROW(cfg.validate(), ParameterError);
  cfg = DetectorConfig{};
  cfg.lag_l = 0;
  EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(DetectorConfig, ForwardsToAutoencoder) {
  DetectorConfig cfg;
  cfg.epochs = 17;
  cfg.seed = 4;
  cfg.ae_threshold_rule = ThresholdRule::mean_std;
  cfg.ae_threshold_k = 2.5;
  const auto ae = cfg.autoencoder(24);
  EXPECT_EQ(ae.window_length, 24u);
  EXPECT_EQ(ae.epochs, 17u);
  EXPECT_EQ(ae.seed, 4u);
  EXPECT_EQ(ae.threshold_rule, ThresholdRule::mean_std);
  EXPECT_EQ(ae.threshold_k, 2.5);
}

}  // namespace
}  // namespace kpiroot
