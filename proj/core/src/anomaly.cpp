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

#include "kpiroot/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <string>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

std::vector<double> shifted_copy(std::span<const double> p) {
  const double lo = *std::min_element(p.begin(), p.end());
  std::vector<double> out(p.begin(), p.end());
  for (double& v : out) v += 1.0 - lo;
  return out;
}

double median_inplace(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double med = v[mid];
  if (v.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return med;
}

}  // namespace

std::string_view to_string(SegmentKind kind) {
  switch (kind) {
    case SegmentKind::trend: return "trend";
    case SegmentKind::seasonal: return "seasonal";
    case SegmentKind::residual: return "residual";
    case SegmentKind::fused: return "fused";
  }
  return "fused";
}

AutoencoderConfig DetectorConfig::autoencoder(std::size_t window) const {
  AutoencoderConfig cfg;
  cfg.window_length = window;
  cfg.epochs = epochs;
  cfg.learning_rate = learning_rate;
  cfg.seed = seed;
  cfg.train_stride = train_stride;
  cfg.threshold_rule = ae_threshold_rule;
  cfg.threshold_k = ae_threshold_k;
  return cfg;
}

void DetectorConfig::validate() const {
  if (!(gamma > 1.0)) throw ParameterError("gamma must be > 1");
  if (lag_l < 1) throw ParameterError("trend lags must be >= 1");
  if (!(sigma_k > 0.0)) throw ParameterError("sigma multiplier must be positive");
  if (window_length < 4) throw ParameterError("reconstruction window must be >= 4");
  if (!(learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (!(ae_threshold_k > 0.0)) throw ParameterError("reconstruction threshold multiplier must be positive");
}

std::vector<double> trend_ratio_scores(std::span<const double> paa_values, std::size_t l) {
  const std::size_t w = paa_values.size();
  if (l == 0) throw ParameterError("trend ratio lag must be >= 1");
  if (2 * l > w) {
    throw ParameterError("trend ratio needs 2l <= w (l=" + std::to_string(l) +
                         ", w=" + std::to_string(w) + ")");
  }
  const auto p = shifted_copy(paa_values);
  std::vector<double> r(w, std::numeric_limits<double>::quiet_NaN());
  double back = 0.0;
  double fwd = 0.0;
  for (std::size_t k = 0; k < l; ++k) {
    back += p[k];
    fwd += p[l + k];
  }
  for (std::size_t i = l;; ++i) {
    r[i] = fwd / back;
    if (i + l >= w) break;
    back += p[i] - p[i - l];
    fwd += p[i + l] - p[i];
  }
  return r;
}

std::vector<AnomalySegment> detect_trend_overload(std::span<const double> paa_values,
                                                  double gamma, std::size_t l) {
  const std::size_t w = paa_values.size();
  if (w < 2 * l || l == 0) return {};
  const auto r = trend_ratio_scores(paa_values, l);
  const auto p = shifted_copy(paa_values);

  std::vector<AnomalySegment> out;
  std::size_t i = l;
  while (i + l <= w) {
    if (!(r[i] > gamma)) {
      ++i;
      continue;
    }
    double back_mean = 0.0;
    for (std::size_t j = i - l; j < i; ++j) back_mean += p[j];
    back_mean /= static_cast<double>(l);
    // The forward sum exceeds gamma * back sum, so some point exceeds
    // gamma * back mean; start the overload there.
    std::size_t start = i;
    while (start < i + l - 1 && !(p[start] > gamma * back_mean)) ++start;

    std::size_t end = start + 1;
    while (end < w && !(p[end] < p[start])) ++end;
    out.push_back({start, end, SegmentKind::trend, r[i]});
    if (end >= w) break;
    i = std::max(end, l);
  }
  return out;
}

std::vector<AnomalySegment> detect_trend_overload(const PaaVector& paa, const DetectorConfig& cfg) {
  return detect_trend_overload(paa.values, cfg.gamma, cfg.lag_l);
}

std::vector<std::size_t> robust_sigma_detect(std::span<const double> values, double k) {
  if (values.size() < 3) throw ParameterError("robust sigma detection needs >= 3 samples");
  std::vector<double> work(values.begin(), values.end());
  const double med = median_inplace(work);
  for (std::size_t i = 0; i < values.size(); ++i) work[i] = std::abs(values[i] - med);
  const double mad = median_inplace(work);

  std::vector<std::size_t> out;
  if (mad == 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i] != med) out.push_back(i);
    }
    return out;
  }
  const double cutoff = k * 1.4826 * mad;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::abs(values[i] - med) > cutoff) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> fuse_anomaly_indices(std::span<const std::size_t> trend_idx,
                                              std::span<const std::size_t> seasonal_idx,
                                              std::span<const std::size_t> residual_idx) {
  std::vector<std::size_t> out;
  out.reserve(trend_idx.size() + seasonal_idx.size() + residual_idx.size());
  out.insert(out.end(), trend_idx.begin(), trend_idx.end());
  out.insert(out.end(), seasonal_idx.begin(), seasonal_idx.end());
  out.insert(out.end(), residual_idx.begin(), residual_idx.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> fuse_anomaly_indices(std::span<const std::size_t> trend_idx,
                                              std::span<const std::size_t> seasonal_idx,
                                              std::span<const std::size_t> residual_idx,
                                              const PaaVector& paa) {
  return to_segment_indices(fuse_anomaly_indices(trend_idx, seasonal_idx, residual_idx), paa);
}

std::vector<std::size_t> segment_samples(std::span<const AnomalySegment> segments,
                                         const PaaVector& paa) {
  std::vector<std::size_t> out;
  for (const auto& seg : segments) {
    if (seg.start >= seg.end || seg.end > paa.size()) {
      throw ParameterError("segment outside the PAA vector");
    }
    for (std::size_t i = paa.bounds[seg.start].begin; i < paa.bounds[seg.end - 1].end; ++i) {
      out.push_back(i);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AnomalySegment> segments_from_indices(std::span<const std::size_t> indices,
                                                  std::size_t max_gap, std::size_t min_length,
                                                  std::size_t limit) {
  std::vector<AnomalySegment> raw;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw ParameterError("segments_from_indices: indices must be sorted and unique");
    }
    if (!raw.empty() && indices[i] - (raw.back().end - 1) <= max_gap) {
      raw.back().end = indices[i] + 1;
    } else {
      raw.push_back({indices[i], indices[i] + 1, SegmentKind::fused, 0.0});
    }
  }

  for (auto& seg : raw) {
    if (seg.size() >= min_length) continue;
    const std::size_t missing = min_length - seg.size();
    const std::size_t grow_left = std::min(seg.start, missing / 2);
    seg.start -= grow_left;
    seg.end += missing - grow_left;
    if (limit != 0 && seg.end > limit) {
      const std::size_t over = seg.end - limit;
      seg.end = limit;
      seg.start -= std::min(seg.start, over);
    }
  }

  std::vector<AnomalySegment> out;
  for (const auto& seg : raw) {
    if (!out.empty() && seg.start <= out.back().end) {
      out.back().end = std::max(out.back().end, seg.end);
    } else {
      out.push_back(seg);
    }
  }
  for (auto& seg : out) seg.score = static_cast<double>(seg.size());
  return out;
}

}  // namespace kpiroot
