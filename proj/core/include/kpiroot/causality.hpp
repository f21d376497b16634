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

#include "kpiroot/anomaly.hpp"

namespace kpiroot {

/// Least-squares autoregression over a segment.
///
/// `coefficients` are [intercept, own lags 1..q] for the restricted model
/// and [intercept, own lags 1..q, exogenous lags 1..q] for the augmented one.
struct ArFit {
  std::size_t order = 0;
  std::vector<double> coefficients;
  std::vector<double> residuals;
  double rss = 0.0;
  /// True when the Gram matrix was ill-conditioned and a Tikhonov term was
  /// added.
  bool regularized = false;
};

struct GrangerResult {
  double f_statistic = 0.0;
  std::size_t df1 = 0;
  std::size_t df2 = 0;
  double restricted_rss = 0.0;
  double unrestricted_rss = 0.0;
};

struct GrangerOptions {
  /// Returned when the augmented fit is exact but the restricted one is not.
  double f_max = 1e6;
  /// Residual sum of squares treated as an exact fit.
  double exact_fit_rss = 1e-12;
};

/// y_t on [1, y_{t-1}, ..., y_{t-q}] for t = q .. y.size()-1.
/// Throws InsufficientDataError unless y.size() > 2q + 1.
ArFit fit_ar(std::span<const double> y, std::size_t q);

/// y_t on [1, y lags 1..q, x lags 1..q]. Throws ParameterError on length
/// mismatch, InsufficientDataError unless y.size() > 2q + 1.
ArFit fit_arx(std::span<const double> y, std::span<const double> x, std::size_t q);

/// Granger F statistic for x -> y over `segment` = [t_s, t_e):
///   F = ((rss_r - rss_u) / q) / (rss_u / (t_e - t_s - 2q - 1)),
/// with both regressions fitted for t in [t_s + q, t_e).
/// Throws InsufficientDataError when the denominator degrees of freedom
/// would be < 1, ParameterError if the segment exceeds either series.
GrangerResult granger_f(std::span<const double> y_alarm, std::span<const double> x_candidate,
                        const AnomalySegment& segment, std::size_t q,
                        const GrangerOptions& options = {});

}  // namespace kpiroot
