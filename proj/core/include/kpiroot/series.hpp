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
#include <vector>

namespace kpiroot {

/// A uniformly sampled, finite-valued monitoring series.
///
/// The constructor enforces the invariants: at least two samples, every
/// sample finite, and a strictly positive sampling interval.
class KpiSeries {
 public:
  KpiSeries(std::string id, std::vector<double> values, std::int64_t start_time = 0,
            std::int64_t interval = 60);

  const std::string& id() const noexcept { return id_; }
  std::int64_t start_time() const noexcept { return start_time_; }
  std::int64_t interval() const noexcept { return interval_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::int64_t timestamp(std::size_t i) const noexcept {
    return start_time_ + static_cast<std::int64_t>(i) * interval_;
  }

 private:
  std::string id_;
  std::int64_t start_time_;
  std::int64_t interval_;
  std::vector<double> values_;
};

struct NormalizedSeries {
  std::vector<double> values;
  double source_mean = 0.0;
  /// Population standard deviation; 0 marks the degenerate-constant case.
  double source_std = 0.0;
};

/// Half-open source index range [begin, end) covered by one PAA segment.
struct SegmentBounds {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

struct PaaVector {
  std::vector<double> values;
  std::vector<SegmentBounds> bounds;
  std::size_t source_length = 0;

  std::size_t size() const noexcept { return values.size(); }
};

struct TrendSigns {
  std::vector<std::int8_t> signs;

  std::size_t size() const noexcept { return signs.size(); }
};

/// z-score with population statistics. A constant input maps to all zeros
/// with `source_std == 0`.
NormalizedSeries znormalize(std::span<const double> values);
NormalizedSeries znormalize(const KpiSeries& series);

/// Contiguous balanced partition of [0, n) into w segments: the first
/// n mod w segments hold ceil(n/w) samples, the rest floor(n/w).
std::vector<SegmentBounds> balanced_partition(std::size_t n, std::size_t w);

/// Piecewise aggregate approximation: the mean of each partition segment.
/// Throws ParameterError unless 1 <= w <= n.
PaaVector paa(std::span<const double> values, std::size_t w);

/// Sign of (last - first) sample within each PAA segment; flat segments get 0.
TrendSigns trend_signs(std::span<const double> raw, const PaaVector& paa);

/// round(sqrt(n)), clamped to [1, n].
std::size_t default_word_size(std::size_t n);

/// Maps sample indices to the sorted set of PAA segments containing them.
std::vector<std::size_t> to_segment_indices(std::span<const std::size_t> sample_indices,
                                            const PaaVector& paa);

}  // namespace kpiroot
