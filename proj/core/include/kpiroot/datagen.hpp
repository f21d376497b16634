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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kpiroot/evaluation.hpp"
#include "kpiroot/series.hpp"

namespace kpiroot {

enum class AnomalyKind { trend_shift, seasonal_deviation, residual_spike };

std::string_view to_string(AnomalyKind kind);
AnomalyKind anomaly_kind_from_string(std::string_view name);

/// Parameters of one synthetic incident.
struct ScenarioSpec {
  std::size_t m = 50;
  std::size_t n = 2880;
  std::size_t period = 48;
  /// 0 draws the count uniformly from [min_root_causes, max_root_causes].
  std::size_t num_root_causes = 0;
  std::size_t min_root_causes = 3;
  std::size_t max_root_causes = 8;
  std::size_t lag_delta = 5;
  /// Per-sample noise std of every candidate, relative to its cycle amplitude.
  double noise_sigma = 0.25;
  /// Sampling weights over {trend_shift, seasonal_deviation, residual_spike}.
  std::array<double, 3> kind_weights{1.0, 1.0, 1.0};
  std::uint64_t seed = 0;

  /// Throws ParameterError when an invariant does not hold.
  void validate() const;
};

struct Injection {
  std::string series_id;
  AnomalyKind kind = AnomalyKind::trend_shift;
  LabelWindow window;
  double magnitude = 0.0;
};

struct LabeledDataset {
  std::string incident_id;
  ScenarioSpec spec;
  KpiSeries alarm;
  std::vector<KpiSeries> candidates;
  RcaGroundTruth truth;
  /// Windows injected into root-cause candidates.
  std::vector<Injection> injections;
  /// Where the propagated anomaly sits in the alarm (merged, sorted).
  std::vector<LabelWindow> alarm_windows;
  /// Aggregation weight of every candidate, in candidate order.
  std::vector<double> weights;
};

struct InjectedSeries {
  std::vector<double> values;
  LabelWindow window;
};

/// Adds one anomaly of `kind` over [t0, t0 + duration).
///
/// trend_shift adds a constant `magnitude`; residual_spike adds
/// `magnitude * exp(-3 j / duration)` at offset j, a burst that decays over
/// its window; seasonal_deviation removes the cycle given by
/// `seasonal_template` and adds `magnitude * replacement[t]` in its place.
/// An empty `replacement` stands for the phase-inverted template scaled to
/// unit peak. Throws ParameterError when the window overflows the series or
/// a seasonal deviation lacks templates of matching length.
InjectedSeries inject_anomaly(std::span<const double> series, AnomalyKind kind,
                              std::size_t t0, double magnitude, std::size_t duration,
                              std::span<const double> seasonal_template = {},
                              std::span<const double> replacement = {});

/// Unit-amplitude oscillation at a sixth of the base frequency (period
/// 6 * period) with the given phase; the replacement cycle of generated
/// seasonal deviations.
std::vector<double> deviation_cycle(std::size_t n, std::size_t period, double phase);

/// Seeded incident: m candidates of the form level + cycle + noise, a set of
/// root causes that each carry one anomaly of the incident's kind starting
/// at a common t0, and an alarm equal to the weighted mean of all candidates
/// plus its own noise, where root-cause anomalies reach the alarm lag_delta
/// samples late. Seasonal deviations of one incident share their
/// replacement oscillation.
LabeledDataset generate_scenario(const ScenarioSpec& spec);

/// A single seasonal KPI carrying several anomalies of mixed kinds.
struct DetectionCaseSpec {
  std::size_t n = 2880;
  std::size_t period = 48;
  std::size_t anomalies = 3;
  double noise_sigma = 0.25;
  std::uint64_t seed = 0;
};

struct DetectionCase {
  KpiSeries series;
  std::vector<LabelWindow> windows;
  std::vector<AnomalyKind> kinds;
};

DetectionCase generate_detection_case(const DetectionCaseSpec& spec);

nlohmann::ordered_json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_spec_from_json(const nlohmann::json& j);

/// Writes `manifest.json` plus one `timestamp,value` CSV per series.
void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& dir);

/// Manifest of a dataset directory (ids, files, truth, label windows).
struct DatasetManifest {
  std::string incident_id;
  std::string alarm_id;
  std::filesystem::path alarm_file;
  std::vector<std::string> candidate_ids;
  std::vector<std::filesystem::path> candidate_files;
  RcaGroundTruth truth;
  /// Seasonal period recorded by the generator; 0 when unknown.
  std::size_t period = 0;
};

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

/// Loads alarm and candidates. Without a manifest the directory's
/// `alarm.csv` is the alarm and every other `*.csv`, sorted by name, is a
/// candidate.
struct LoadedDataset {
  DatasetManifest manifest;
  KpiSeries alarm;
  std::vector<KpiSeries> candidates;
};

LoadedDataset load_dataset(const std::filesystem::path& dir);

}  // namespace kpiroot
