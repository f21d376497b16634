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

#include "kpiroot/series.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpiroot/error.hpp"

namespace kpiroot {

KpiSeries::KpiSeries(std::string id, std::vector<double> values, std::int64_t start_time,
                     std::int64_t interval)
    : id_(std::move(id)), start_time_(start_time), interval_(interval), values_(std::move(values)) {
  if (interval_ <= 0) {
    throw ParameterError("series '" + id_ + "': sampling interval must be positive");
  }
  if (values_.size() < 2) {
    throw ParameterError("series '" + id_ + "': at least two samples required");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw ParameterError("series '" + id_ + "': non-finite value at index " +
                           std::to_string(i));
    }
  }
}

NormalizedSeries znormalize(std::span<const double> values) {
  NormalizedSeries out;
  const auto n = static_cast<double>(values.size());
  if (values.empty()) return out;

  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);

  out.source_mean = mean;
  // Relative cutoff: a constant series can leave rounding noise in `ss`.
  const double scale = std::max(1.0, std::abs(mean));
  if (!(sd > 1e-12 * scale)) {
    out.values.assign(values.size(), 0.0);
    out.source_std = 0.0;
    return out;
  }
  out.source_std = sd;
  out.values.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.values[i] = (values[i] - mean) / sd;
  return out;
}

NormalizedSeries znormalize(const KpiSeries& series) { return znormalize(series.values()); }

std::vector<SegmentBounds> balanced_partition(std::size_t n, std::size_t w) {
  if (w == 0 || w > n) {
    throw ParameterError("PAA size w=" + std::to_string(w) + " outside [1, " +
                         std::to_string(n) + "]");
  }
  std::vector<SegmentBounds> bounds(w);
  const std::size_t base = n / w;
  const std::size_t extra = n % w;
  std::size_t begin = 0;
  for (std::size_t j = 0; j < w; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    bounds[j] = {begin, begin + len};
    begin += len;
  }
  return bounds;
}

PaaVector paa(std::span<const double> values, std::size_t w) {
  PaaVector out;
  out.source_length = values.size();
  out.bounds = balanced_partition(values.size(), w);
  out.values.resize(w);
  for (std::size_t j = 0; j < w; ++j) {
    const auto [b, e] = out.bounds[j];
    double sum = 0.0;
    for (std::size_t i = b; i < e; ++i) sum += values[i];
    out.values[j] = sum / static_cast<double>(e - b);
  }
  return out;
}

TrendSigns trend_signs(std::span<const double> raw, const PaaVector& paa) {
  if (raw.size() != paa.source_length) {
    throw ParameterError("trend_signs: series length does not match the PAA source");
  }
  TrendSigns out;
  out.signs.resize(paa.size());
  for (std::size_t j = 0; j < paa.size(); ++j) {
    const double diff = raw[paa.bounds[j].end - 1] - raw[paa.bounds[j].begin];
    out.signs[j] = static_cast<std::int8_t>((diff > 0.0) - (diff < 0.0));
  }
  return out;
}

std::size_t default_word_size(std::size_t n) {
  const auto w = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return std::clamp<std::size_t>(w, 1, std::max<std::size_t>(n, 1));
}

std::vector<std::size_t> to_segment_indices(std::span<const std::size_t> sample_indices,
                                            const PaaVector& paa) {
  std::vector<std::size_t> out;
  // Balanced partition: segment of sample i found by bisection over bounds.
  for (std::size_t i : sample_indices) {
    if (i >= paa.source_length) {
      throw ParameterError("sample index " + std::to_string(i) + " outside the series");
    }
    auto it = std::upper_bound(paa.bounds.begin(), paa.bounds.end(), i,
                               [](std::size_t v, const SegmentBounds& b) { return v < b.end; });
    out.push_back(static_cast<std::size_t>(it - paa.bounds.begin()));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace kpiroot
