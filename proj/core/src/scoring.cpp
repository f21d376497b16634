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

#include "kpiroot/scoring.hpp"

#include <algorithm>
#include <string>

#include "kpiroot/error.hpp"

namespace kpiroot {

SelectionPolicy SelectionPolicy::top_k_policy(std::size_t k) {
  SelectionPolicy p;
  p.mode = Mode::top_k;
  p.k = k;
  return p;
}

SelectionPolicy SelectionPolicy::relative(double theta) {
  SelectionPolicy p;
  p.mode = Mode::relative_threshold;
  p.theta = theta;
  return p;
}

void SelectionPolicy::validate() const {
  if (mode == Mode::top_k && k == 0) throw ParameterError("top-k selection needs k >= 1");
  if (mode == Mode::relative_threshold && !(theta > 0.0 && theta <= 1.0)) {
    throw ParameterError("relative threshold must lie in (0, 1]");
  }
}

std::string_view to_string(SelectionPolicy::Mode mode) {
  return mode == SelectionPolicy::Mode::top_k ? "top_k" : "relative_threshold";
}

SelectionPolicy::Mode selection_mode_from_string(std::string_view name) {
  if (name == "top_k" || name == "top-k") return SelectionPolicy::Mode::top_k;
  if (name == "relative_threshold" || name == "threshold" || name == "relative") {
    return SelectionPolicy::Mode::relative_threshold;
  }
  throw ParameterError("unknown selection policy '" + std::string(name) + "'");
}

std::vector<double> scale_causality(std::span<const double> f_values) {
  if (f_values.empty()) return {};
  for (double f : f_values) {
    if (!(f >= 0.0)) throw ParameterError("causality statistics must be >= 0");
  }
  const auto [lo, hi] = std::minmax_element(f_values.begin(), f_values.end());
  std::vector<double> out(f_values.size(), 0.5);
  const double range = *hi - *lo;
  if (range > 0.0) {
    for (std::size_t i = 0; i < f_values.size(); ++i) out[i] = (f_values[i] - *lo) / range;
  }
  return out;
}

double correlation_score(double similarity, double causality_scaled, double lambda) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(similarity) || !in_unit(causality_scaled) || !in_unit(lambda)) {
    throw ParameterError("correlation_score inputs must lie in [0, 1]");
  }
  return lambda * similarity + (1.0 - lambda) * causality_scaled;
}

std::vector<CorrelationScore> rank_candidates(std::vector<CorrelationScore> scores) {
  std::sort(scores.begin(), scores.end(), [](const CorrelationScore& a, const CorrelationScore& b) {
    if (a.combined != b.combined) return a.combined > b.combined;
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.kpi_id < b.kpi_id;
  });
  for (std::size_t i = 0; i < scores.size(); ++i) scores[i].rank = i + 1;
  return scores;
}

std::vector<std::string> select_root_causes(std::span<const CorrelationScore> ranked,
                                            const SelectionPolicy& policy) {
  policy.validate();
  if (ranked.empty()) throw ParameterError("select_root_causes: no candidates");
  std::vector<std::string> out;
  if (policy.mode == SelectionPolicy::Mode::top_k) {
    const std::size_t k = std::min(policy.k, ranked.size());
    for (std::size_t i = 0; i < k; ++i) out.push_back(ranked[i].kpi_id);
    return out;
  }
  double best = ranked.front().combined;
  for (const auto& s : ranked) best = std::max(best, s.combined);
  const double cutoff = policy.theta * best;
  for (const auto& s : ranked) {
    if (s.combined >= cutoff) out.push_back(s.kpi_id);
  }
  return out;
}

}  // namespace kpiroot
