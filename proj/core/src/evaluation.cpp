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

#include "kpiroot/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

PrecisionRecall precision_recall_f1(const std::set<std::string>& predicted,
                                    const std::set<std::string>& truth) {
  if (truth.empty()) throw ParameterError("ground truth must not be empty");
  std::size_t tp = 0;
  for (const auto& id : predicted) tp += truth.count(id);
  PrecisionRecall out;
  out.precision = predicted.empty() ? 0.0 : static_cast<double>(tp) / predicted.size();
  out.recall = static_cast<double>(tp) / truth.size();
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

double hit_rate_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                     std::size_t k) {
  if (k == 0) throw ParameterError("k must be >= 1");
  if (truth.empty()) return 0.0;
  const std::size_t depth = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += truth.count(ranked[i]);
  return static_cast<double>(hits) / static_cast<double>(std::min(k, truth.size()));
}

double ndcg_at_k(std::span<const std::string> ranked, const std::set<std::string>& truth,
                 std::size_t k) {
  if (k == 0) throw ParameterError("k must be >= 1");
  if (truth.empty()) return 0.0;
  double dcg = 0.0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t i = 0; i < depth; ++i) {
    if (truth.count(ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  double idcg = 0.0;
  const std::size_t ideal = std::min(k, truth.size());
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  return dcg / idcg;
}

void PointAdjustedAccumulator::add(std::span<const std::size_t> flagged,
                                   std::span<const LabelWindow> labeled) {
  std::vector<std::size_t> flags(flagged.begin(), flagged.end());
  std::sort(flags.begin(), flags.end());
  flags.erase(std::unique(flags.begin(), flags.end()), flags.end());

  // Merge overlapping windows so a point is never counted twice.
  std::vector<LabelWindow> windows(labeled.begin(), labeled.end());
  std::sort(windows.begin(), windows.end(),
            [](const LabelWindow& a, const LabelWindow& b) { return a.start < b.start; });
  std::vector<LabelWindow> merged;
  for (const auto& w : windows) {
    if (w.end <= w.start) continue;
    if (!merged.empty() && w.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, w.end);
    } else {
      merged.push_back(w);
    }
  }

  std::size_t inside_flags = 0;
  for (const auto& w : merged) {
    const auto lo = std::lower_bound(flags.begin(), flags.end(), w.start);
    const auto hi = std::lower_bound(flags.begin(), flags.end(), w.end);
    const auto count = static_cast<std::size_t>(hi - lo);
    ++windows_;
    if (count > 0) {
      ++detected_windows_;
      true_points_ += w.end - w.start;
      predicted_points_ += w.end - w.start;
    }
    inside_flags += count;
  }
  predicted_points_ += flags.size() - inside_flags;
}

PrecisionRecall PointAdjustedAccumulator::result() const {
  PrecisionRecall out;
  out.precision = predicted_points_ == 0 ? 0.0
                                         : static_cast<double>(true_points_) / predicted_points_;
  out.recall = windows_ == 0 ? 0.0 : static_cast<double>(detected_windows_) / windows_;
  out.f1 = harmonic(out.precision, out.recall);
  return out;
}

PrecisionRecall point_adjusted_f1(std::span<const std::size_t> flagged,
                                  std::span<const LabelWindow> labeled) {
  PointAdjustedAccumulator acc;
  acc.add(flagged, labeled);
  return acc.result();
}

MetricReport evaluate_incident(std::span<const std::string> ranked,
                               const std::set<std::string>& predicted,
                               const RcaGroundTruth& truth, std::span<const std::size_t> ks) {
  const auto prf = precision_recall_f1(predicted, truth.root_causes);
  MetricReport report;
  report.precision = prf.precision;
  report.recall = prf.recall;
  report.f1 = prf.f1;
  for (std::size_t k : ks) {
    report.hit_at[k] = hit_rate_at_k(ranked, truth.root_causes, k);
    report.ndcg_at[k] = ndcg_at_k(ranked, truth.root_causes, k);
  }
  return report;
}

MetricReport mean_report(std::span<const MetricReport> reports) {
  MetricReport out;
  if (reports.empty()) return out;
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    out.precision += r.precision / n;
    out.recall += r.recall / n;
    out.f1 += r.f1 / n;
    for (const auto& [k, v] : r.hit_at) out.hit_at[k] += v / n;
    for (const auto& [k, v] : r.ndcg_at) out.ndcg_at[k] += v / n;
  }
  return out;
}

nlohmann::ordered_json to_json(const MetricReport& report) {
  nlohmann::ordered_json j;
  j["precision"] = report.precision;
  j["recall"] = report.recall;
  j["f1"] = report.f1;
  for (const auto& [k, v] : report.hit_at) j["hit@" + std::to_string(k)] = v;
  for (const auto& [k, v] : report.ndcg_at) j["ndcg@" + std::to_string(k)] = v;
  return j;
}

}  // namespace kpiroot
