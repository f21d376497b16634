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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kpiroot/anomaly.hpp"
#include "kpiroot/decomposition.hpp"
#include "kpiroot/scoring.hpp"
#include "kpiroot/series.hpp"
#include "kpiroot/symbolic.hpp"

namespace kpiroot {

enum class DetectionMode {
  /// STL split; reconstruction detectors on every component, trend ratio on
  /// the trend, robust sigma on the residual.
  decomposition,
  /// Trend ratio on the raw alarm only.
  trend_only,
};

enum class CausalityScaling { min_max, raw };

std::string_view to_string(DetectionMode mode);
DetectionMode detection_mode_from_string(std::string_view name);
std::string_view to_string(CausalityScaling scaling);
CausalityScaling causality_scaling_from_string(std::string_view name);

/// Every tunable of one localization run.
struct RunConfig {
  std::size_t w = 0;  // 0: round(sqrt(n))
  int alpha = 9;
  double lambda = 0.9;
  double gamma = 2.0;
  std::size_t lag_l = 5;
  std::size_t q = 3;
  std::size_t period = 0;
  std::size_t seasonal_window = 7;
  std::size_t trend_window = 0;  // 0: STL heuristic
  SelectionPolicy policy;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  double sigma_k = 5.0;
  std::size_t window_length = 32;
  std::size_t epochs = 500;
  double learning_rate = 0.01;
  std::size_t train_stride = 0;
  ThresholdRule ae_threshold_rule = ThresholdRule::median_mad;
  double ae_threshold_k = 12.0;
  std::size_t max_gap = 2;

  DetectionMode detection = DetectionMode::decomposition;
  /// In decomposition mode, also fuse trend-ratio overloads found on the STL
  /// trend. Trend-only mode always uses them.
  bool trend_ratio_in_fusion = false;
  Encoding encoding = Encoding::isax;
  CausalityScaling causality_scaling = CausalityScaling::min_max;

  std::size_t resolved_w(std::size_t n) const;
  StlConfig stl() const;
  DetectorConfig detector() const;
  /// Throws ParameterError describing the first out-of-range field.
  void validate() const;
};

/// Sample-level anomaly evidence on the alarm, independent of the PAA size.
struct AlarmDetection {
  DetectionMode mode = DetectionMode::decomposition;
  NormalizedSeries normalized;
  Decomposition decomposition;  // empty in trend_only mode
  std::vector<std::size_t> trend_idx;
  std::vector<std::size_t> seasonal_idx;
  std::vector<std::size_t> residual_idx;
};

/// Runs the w-independent part of detection (STL, reconstruction
/// detectors, robust sigma). The three component detectors train
/// concurrently when cfg.jobs > 1.
AlarmDetection detect_alarm(const KpiSeries& alarm, const RunConfig& cfg);

/// PAA-coordinate anomaly indices and F-test segments for one w.
struct SegmentDetection {
  PaaVector alarm_paa;
  TrendSigns alarm_signs;
  std::vector<std::size_t> sample_indices;
  std::vector<std::size_t> paa_indices;
  std::vector<AnomalySegment> segments;
};

SegmentDetection detect_segments(const AlarmDetection& detection, const RunConfig& cfg);

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct LocalizationReport {
  static constexpr int kSchemaVersion = 1;

  std::string incident_id;
  RunConfig config;
  std::size_t n = 0;
  std::size_t w = 0;
  std::size_t m = 0;
  std::vector<std::size_t> anomaly_indices;
  std::vector<AnomalySegment> segments;
  std::vector<CorrelationScore> ranking;
  std::vector<std::string> predicted;
  std::vector<std::string> warnings;
  std::vector<StageTiming> timings;

  bool anomaly_found() const noexcept { return !segments.empty(); }
  std::vector<std::string> ranked_ids() const;
};

/// End-to-end root-cause localization. `cached` skips detect_alarm when the
/// caller already ran it with a compatible configuration. Candidates must
/// have the alarm's length (ParameterError otherwise).
LocalizationReport localize(const KpiSeries& alarm, std::span<const KpiSeries> candidates,
                            const RunConfig& cfg, const AlarmDetection* cached = nullptr);

}  // namespace kpiroot
