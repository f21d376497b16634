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
#include <string>
#include <string_view>
#include <vector>

namespace kpiroot {

struct CorrelationScore {
  std::string kpi_id;
  double similarity = 0.0;
  double causality_raw = 0.0;
  double causality_scaled = 0.0;
  double combined = 0.0;
  std::size_t rank = 0;
};

struct SelectionPolicy {
  enum class Mode { top_k, relative_threshold };

  Mode mode = Mode::relative_threshold;
  std::size_t k = 5;
  double theta = 0.8;

  static SelectionPolicy top_k_policy(std::size_t k);
  static SelectionPolicy relative(double theta);
  /// Throws ParameterError when k == 0 (top_k) or theta is outside (0, 1].
  void validate() const;
};

std::string_view to_string(SelectionPolicy::Mode mode);
SelectionPolicy::Mode selection_mode_from_string(std::string_view name);

/// Min-max scaling across the candidate cohort; a zero range maps to 0.5.
/// Throws ParameterError on negative input.
std::vector<double> scale_causality(std::span<const double> f_values);

/// lambda * similarity + (1 - lambda) * causality. Throws ParameterError if
/// any input is outside [0, 1].
double correlation_score(double similarity, double causality_scaled, double lambda);

/// Sorts by combined score descending, then similarity descending, then id
/// ascending, and assigns 1-based ranks.
std::vector<CorrelationScore> rank_candidates(std::vector<CorrelationScore> scores);

/// Ids picked from an already ranked list. Throws ParameterError on an
/// empty list or an invalid policy.
std::vector<std::string> select_root_causes(std::span<const CorrelationScore> ranked,
                                            const SelectionPolicy& policy);

}  // namespace kpiroot
