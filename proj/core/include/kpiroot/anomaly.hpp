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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kpiroot/autoencoder.hpp"
#include "kpiroot/series.hpp"

namespace kpiroot {

enum class SegmentKind { trend, seasonal, residual, fused };

std::string_view to_string(SegmentKind kind);

/// Half-open interval [start, end) in PAA coordinates.
struct AnomalySegment {
  std::size_t start = 0;
  std::size_t end = 0;
  SegmentKind kind = SegmentKind::fused;
  double score = 0.0;

  std::size_t size() const noexcept { return end - start; }
  friend bool operator==(const AnomalySegment&, const AnomalySegment&) = default;
};

struct DetectorConfig {
  /// Trend-ratio threshold, > 1.
  double gamma = 2.0;
  /// Historical lags (PAA points) in each trend-ratio window.
  std::size_t lag_l = 5;
  /// Robust-sigma multiplier on the residual component.
  double sigma_k = 5.0;
  /// Reconstruction window for the trend and residual components. The
  /// seasonal detector always uses one period.
  std::size_t window_length = 32;
  std::size_t epochs = 500;
  double learning_rate = 0.01;
  std::uint64_t seed = 0;
  std::size_t train_stride = 0;
  ThresholdRule ae_threshold_rule = ThresholdRule::median_mad;
  double ae_threshold_k = 12.0;

  AutoencoderConfig autoencoder(std::size_t window) const;
  void validate() const;
};

/// Ratio of the next-l to the previous-l window sums,
///   r_i = sum(p[i .. i+l-1]) / sum(p[i-l .. i-1]),
/// computed on p shifted by (1 - min p) so every value is >= 1. Entries
/// where the ratio is undefined (i < l or i + l > w) are NaN.
/// Throws ParameterError when l == 0 or 2l > w.
std::vector<double> trend_ratio_scores(std::span<const double> paa_values, std::size_t l);

/// Overload segments from the trend ratio. A segment opens at the first i
/// with r_i > gamma; its start is the first point of the forward window
/// that exceeds gamma times the mean of the backward window. It closes at
/// the first later point whose value drops below the start value (end is
/// exclusive), or at w if it never does. Segments are disjoint and ordered.
std::vector<AnomalySegment> detect_trend_overload(std::span<const double> paa_values,
                                                  double gamma, std::size_t l);
std::vector<AnomalySegment> detect_trend_overload(const PaaVector& paa,
                                                  const DetectorConfig& cfg);

/// Indices t with |x_t - median| > k * 1.4826 * MAD. With MAD == 0 every
/// value different from the median is flagged. Throws ParameterError for
/// fewer than 3 samples.
std::vector<std::size_t> robust_sigma_detect(std::span<const double> values, double k = 3.0);

/// Sorted, de-duplicated union of the per-component sample index sets.
std::vector<std::size_t> fuse_anomaly_indices(std::span<const std::size_t> trend_idx,
                                              std::span<const std::size_t> seasonal_idx,
                                              std::span<const std::size_t> residual_idx);

/// Union mapped to PAA coordinates: segment j is anomalous iff any of its
/// samples is.
std::vector<std::size_t> fuse_anomaly_indices(std::span<const std::size_t> trend_idx,
                                              std::span<const std::size_t> seasonal_idx,
                                              std::span<const std::size_t> residual_idx,
                                              const PaaVector& paa);

/// Samples covered by PAA-coordinate segments.
std::vector<std::size_t> segment_samples(std::span<const AnomalySegment> segments,
                                         const PaaVector& paa);

/// Groups sorted unique indices into fused segments; neighbours at most
/// `max_gap` apart share a segment. Segments shorter than `min_length` are
/// widened symmetrically (clamped to [0, limit)), and segments that then
/// overlap are merged. `limit == 0` means no upper clamp.
std::vector<AnomalySegment> segments_from_indices(std::span<const std::size_t> indices,
                                                  std::size_t max_gap,
                                                  std::size_t min_length = 0,
                                                  std::size_t limit = 0);

}  // namespace kpiroot
