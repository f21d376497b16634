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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kpiroot/series.hpp"

namespace kpiroot {

/// Additive split x = trend + seasonal + residual. The residual is the exact
/// remainder, and the seasonal part is de-meaned into the trend.
struct Decomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;
  std::size_t period = 0;
};

struct StlConfig {
  std::size_t period = 0;
  /// Loess span for each cycle-subseries, in cycles. Odd, >= 3.
  std::size_t seasonal_window = 7;
  /// Loess span for the trend, in samples. Odd, >= 3; 0 selects the usual
  /// heuristic (smallest odd >= 1.5 * period / (1 - 1.5 / seasonal_window)).
  std::size_t trend_window = 0;
  std::size_t inner_iterations = 2;
  std::size_t outer_iterations = 1;

  /// Defaults for a given period, with trend_window resolved.
  static StlConfig for_period(std::size_t period);

  /// Trend window after resolving the 0 = auto sentinel.
  std::size_t resolved_trend_window() const;
  /// Smallest odd integer >= period (low-pass Loess span).
  std::size_t lowpass_window() const;

  /// Throws ParameterError on even or too-small windows.
  void validate() const;
};

/// Local weighted polynomial regression of y against its index.
///
/// Each output point is fitted over its `span` nearest neighbours (the
/// neighbourhood becomes asymmetric near the ends; nothing is padded) with
/// tricube distance weights, multiplied by `robustness` weights when given.
/// Throws ParameterError if span is even, span > y.size(), degree not in
/// {0, 1}, or robustness has the wrong length.
std::vector<double> loess_smooth(std::span<const double> y, std::size_t span, int degree,
                                 std::span<const double> robustness = {});

/// Seasonal-trend decomposition by Loess. Throws InsufficientDataError
/// when fewer than two full periods are available.
Decomposition stl_decompose(std::span<const double> values, const StlConfig& cfg);
Decomposition stl_decompose(const KpiSeries& series, const StlConfig& cfg);

}  // namespace kpiroot
