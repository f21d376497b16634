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
#include <map>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "kpiroot/error.hpp"
#include "kpiroot/series.hpp"
#include "kpiroot/symbolic.hpp"
#include "oracles.hpp"

namespace kpiroot {
namespace {

IsaxSequence isax_of(const std::vector<double>& raw, std::size_t w, int alpha) {
  const auto z = znormalize(raw);
  const auto p = paa(z.values, w);
  return isax_symbolize(p, trend_signs(z.values, p), gaussian_breakpoints(alpha));
}

TEST(Breakpoints, BinarySplitAtZero) {
  const auto bp = gaussian_breakpoints(2);
  ASSERT_EQ(bp.betas.size(), 1u);
  EXPECT_NEAR(bp.betas[0], 0.0, 1e-12);
}

TEST(Breakpoints, QuartilesForAlphabetFour) {
  const auto bp = gaussian_breakpoints(4);
  ASSERT_EQ(bp.betas.size(), 3u);
  EXPECT_NEAR(bp.betas[0], -0.6745, 1e-3);
  EXPECT_NEAR(bp.betas[1], 0.0, 1e-3);
  EXPECT_NEAR(bp.betas[2], 0.6745, 1e-3);
}

TEST(Breakpoints, TercilesForAlphabetThree) {
  const auto bp = gaussian_breakpoints(3);
  ASSERT_EQ(bp.betas.size(), 2u);
  EXPECT_NEAR(bp.betas[0], -0.4307, 1e-3);
  EXPECT_NEAR(bp.betas[1], 0.4307, 1e-3);
}

TEST(Breakpoints, MatchNormalQuantilesAndIncrease) {
  const boost::math::normal_distribution<double> normal;
  for (int alpha = 2; alpha <= 20; ++alpha) {
    const auto bp = gaussian_breakpoints(alpha);
    ASSERT_EQ(bp.betas.size(), static_cast<std::size_t>(alpha - 1));
    for (int k = 1; k < alpha; ++k) {
      EXPECT_NEAR(bp.betas[k - 1], boost::math::quantile(normal, double(k) / alpha), 1e-6);
      if (k > 1) {
        EXPECT_LT(bp.betas[k - 2], bp.betas[k - 1]);
      }
    }
  }
}

TEST(Breakpoints, RejectsTinyAlphabet) {
  EXPECT_THROW(gaussian_breakpoints(1), ParameterError);
  EXPECT_THROW(gaussian_breakpoints(0), ParameterError);
}

TEST(Sax, BinLookupWithUpperBoundaryRule) {
  const std::vector<double> p{-10.0, 0.0, 10.0};
  const auto s = sax_symbolize(p, gaussian_breakpoints(4));
  EXPECT_EQ(s.symbols, (std::vector<int>{1, 3, 4}));
  EXPECT_EQ(s.encoding, Encoding::sax);
}

TEST(Sax, AllBelowFirstBreakpoint) {
  const std::vector<double> p{-3.0, -2.5, -5.0};
  const auto s = sax_symbolize(p, gaussian_breakpoints(6));
  for (int v : s.symbols) EXPECT_EQ(v, 1);
}

TEST(Sax, SignSplitForBinaryAlphabet) {
  const std::vector<double> p{-1.0, 1.0};
  EXPECT_EQ(sax_symbolize(p, gaussian_breakpoints(2)).symbols, (std::vector<int>{1, 2}));
}

TEST(Sax, ValueOnBreakpointGoesUp) {
  const auto bp = gaussian_breakpoints(5);
  for (std::size_t k = 0; k < bp.betas.size(); ++k) {
    EXPECT_EQ(sax_level(bp.betas[k], bp), static_cast<int>(k) + 2);
  }
}

TEST(Sax, LevelsAreUniformOnGaussianInput) {
  const int alpha = 9;
  const std::size_t n = 100000;
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = normal(rng);
  const auto s = sax_symbolize(paa(x, n), gaussian_breakpoints(alpha));
  std::vector<double> counts(alpha, 0.0);
  for (int v : s.symbols) counts[v - 1] += 1.0;
  const double expected = static_cast<double>(n) / alpha;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared_distribution<double> dist(alpha - 1);
  EXPECT_LT(chi2, boost::math::quantile(dist, 0.99));
}

TEST(Isax, CodeExamplesForLevelTwo) {
  const auto bp = gaussian_breakpoints(4);
  const std::vector<double> p{-0.3, -0.3, -0.3};  // level 2
  const std::vector<std::int8_t> phi{1, -1, 0};
  EXPECT_EQ(isax_symbolize(p, phi, bp).symbols, (std::vector<int>{6, 10, 8}));
}

TEST(Isax, OppositeSignsGiveDistinctCodes) {
  const auto bp = gaussian_breakpoints(9);
  const std::vector<double> p{0.5, 0.5};
  const std::vector<std::int8_t> phi{1, -1};
  const auto s = isax_symbolize(p, phi, bp);
  EXPECT_NE(s.symbols[0], s.symbols[1]);
}

TEST(Isax, ConstantSeriesCodesAreTwiceAlpha) {
  const std::vector<double> x(100, 3.0);
  for (int v : isax_of(x, 10, 9).symbols) EXPECT_EQ(v, 18);
}

TEST(Isax, CodesStayInRange) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int alpha = 2; alpha <= 12; ++alpha) {
    std::vector<double> x(400);
    for (auto& v : x) v = normal(rng);
    for (int v : isax_of(x, 20, alpha).symbols) {
      EXPECT_GE(v, alpha);
      EXPECT_LE(v, 3 * alpha);
    }
  }
}

TEST(Isax, InjectiveOverLevelSignPairs) {
  for (int alpha = 2; alpha <= 16; ++alpha) {
    const auto bp = gaussian_breakpoints(alpha);
    std::map<int, std::pair<int, int>> seen;
    for (int level = 1; level <= alpha; ++level) {
      // Midpoint of the level's bin, or a point beyond the outer breakpoints.
      double value = 0.0;
      if (level == 1) value = bp.betas.front() - 1.0;
      else if (level == alpha) value = bp.betas.back() + 1.0;
      else value = 0.5 * (bp.betas[level - 2] + bp.betas[level - 1]);
      ASSERT_EQ(sax_level(value, bp), level);
      for (std::int8_t phi : {-1, 1}) {
        const std::vector<double> p{value};
        const std::vector<std::int8_t> s{phi};
        const int code = isax_symbolize(p, s, bp).symbols[0];
        const auto [it, inserted] = seen.emplace(code, std::make_pair(level, int{phi}));
        EXPECT_TRUE(inserted) << "code " << code << " reused";
      }
    }
    // The flat class owns code 2*alpha, which no signed pair uses.
    EXPECT_EQ(seen.count(2 * alpha), 0u);
  }
}

TEST(Isax, RejectsLengthMismatch) {
  const std::vector<double> p{0.1, 0.2};
  const std::vector<std::int8_t> phi{1};
  EXPECT_THROW(isax_symbolize(p, phi, gaussian_breakpoints(4)), ParameterError);
}

TEST(Isax, AffineInvarianceIsExact) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> scale(0.05, 50.0);
  std::uniform_real_distribution<double> offset(-500.0, 500.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(2880);
    double level = 0.0;
    for (auto& v : x) v = level += normal(rng);
    const double a = scale(rng);
    const double b = offset(rng);
    std::vector<double> y(x.size());
    std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return a * v + b; });
    EXPECT_EQ(isax_of(x, 54, 9).symbols, isax_of(y, 54, 9).symbols);
  }
}

TEST(Jaccard, IdenticalSequences) {
  IsaxSequence a{{5, 7, 7, 9}, 4, Encoding::isax};
  EXPECT_DOUBLE_EQ(jaccard_similarity(a, a), 1.0);
}

TEST(Jaccard, DisjointCodes) {
  IsaxSequence a{{4, 5}, 4, Encoding::isax};
  IsaxSequence b{{10, 11}, 4, Encoding::isax};
  EXPECT_DOUBLE_EQ(jaccard_similarity(a, b), 0.0);
}

TEST(Jaccard, MultisetExample) {
  IsaxSequence a{{5, 5, 6}, 4, Encoding::isax};
  IsaxSequence b{{5, 6, 6}, 4, Encoding::isax};
  EXPECT_DOUBLE_EQ(jaccard_similarity(a, b), 0.5);
}

TEST(Jaccard, BothEmptyIsOne) {
  IsaxSequence a{{}, 4, Encoding::isax};
  EXPECT_DOUBLE_EQ(jaccard_similarity(a, a), 1.0);
}

TEST(Jaccard, RejectsMismatchedAlphabetOrEncoding) {
  IsaxSequence a{{5}, 4, Encoding::isax};
  IsaxSequence b{{5}, 5, Encoding::isax};
  IsaxSequence c{{2}, 4, Encoding::sax};
  EXPECT_THROW(jaccard_similarity(a, b), ParameterError);
  EXPECT_THROW(jaccard_similarity(a, c), ParameterError);
}

TEST(Jaccard, SymmetricBoundedAndMatchesBruteForce) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(0, 40);
  for (int trial = 0; trial < 1000; ++trial) {
    const int alpha = 2 + trial % 9;
    std::uniform_int_distribution<int> code(alpha, 3 * alpha);
    IsaxSequence a{{}, alpha, Encoding::isax};
    IsaxSequence b{{}, alpha, Encoding::isax};
    for (int i = len(rng); i > 0; --i) a.symbols.push_back(code(rng));
    for (int i = len(rng); i > 0; --i) b.symbols.push_back(code(rng));
    const double ab = jaccard_similarity(a, b);
    EXPECT_EQ(ab, jaccard_similarity(b, a));
    EXPECT_EQ(ab, oracle::multiset_jaccard(a.symbols, b.symbols));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

TEST(Jaccard, OneExactlyWhenMultisetsEqual) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> code(4, 12);
  for (int trial = 0; trial < 300; ++trial) {
    IsaxSequence a{{}, 4, Encoding::isax};
    for (int i = 0; i < 12; ++i) a.symbols.push_back(code(rng));
    IsaxSequence shuffled = a;
    std::shuffle(shuffled.symbols.begin(), shuffled.symbols.end(), rng);
    EXPECT_DOUBLE_EQ(jaccard_similarity(a, shuffled), 1.0);
    IsaxSequence other = a;
    other.symbols[trial % 12] = other.symbols[trial % 12] == 12 ? 4 : other.symbols[trial % 12] + 1;
    EXPECT_LT(jaccard_similarity(a, other), 1.0);
  }
}

TEST(Gather, PicksIndexedElements) {
  const std::vector<int> v{10, 11, 12, 13};
  const std::vector<std::size_t> idx{0, 3};
  EXPECT_EQ(gather<int>(v, idx), (std::vector<int>{10, 13}));
}

TEST(Encoding, NamesRoundTrip) {
  for (auto e : {Encoding::sax, Encoding::isax}) EXPECT_EQ(encoding_from_string(to_string(e)), e);
  EXPECT_THROW(encoding_from_string("paa"), ParameterError);
}

}  // namespace
}  // namespace kpiroot
