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
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kpiroot {

struct RcaGroundTruth {
  std::string incident_id;
  std::set<std::string> root_causes;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::map<std::size_t, double> hit_at;
  std::map<std::size_t, double> ndcg_at;
};

/// Throws ParameterError when the truth set is empty.
PrecisionRecall precision_recall_f1(const std::set<std::string>& predicted,
                                    const std::set<std::string>& truth);

/// |truth n top-k| / min(k, |truth|).
double hit_rate_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                     std::size_t k);

/// Binary-relevance NDCG with log2(rank + 1) discount; the ideal ranking puts
/// min(k, |truth|) relevant items first.
double ndcg_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                 std::size_t k);

/// Half-open labeled anomaly window in sample coordinates.
struct LabelWindow {
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Point-adjusted detection scores. Recall is the fraction of labeled
/// windows that contain at least one flag. For precision, every detected
/// window is expanded to all of its points; flags outside every window stay
/// point-wise false positives.
PrecisionRecall point_adjusted_f1(std::span<const std::size_t> flagged,
                                  std::span<const LabelWindow> labeled);

/// Accumulates point-adjusted counts over many series (micro average).
class PointAdjustedAccumulator {
 public:
  void add(std::span<const std::size_t> flagged, std::span<const LabelWindow> labeled);
  PrecisionRecall result() const;

 private:
  std::size_t true_points_ = 0;
  std::size_t predicted_points_ = 0;
  std::size_t detected_windows_ = 0;
  std::size_t windows_ = 0;
};

/// Ranking metrics of one incident.
MetricReport evaluate_incident(std::span<const std::string> ranked,
                               const std::set<std::string>& predicted,
                               const RcaGroundTruth& truth, std::span<const std::size_t> ks);

/// Arithmetic mean of every field.
MetricReport mean_report(std::span<const MetricReport> reports);

nlohmann::ordered_json to_json(const MetricReport& report);

}  // namespace kpiroot
