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

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kpiroot/series.hpp"

namespace kpiroot {

/// Gaussian-quantile breakpoints for an alphabet of `alpha` symbols.
/// `betas[k-1]` is the k/alpha quantile of N(0, 1), k = 1..alpha-1.
struct Breakpoints {
  int alpha = 0;
  std::vector<double> betas;
};

enum class Encoding { sax, isax };

std::string_view to_string(Encoding encoding);
Encoding encoding_from_string(std::string_view name);

/// Symbol codes of a (possibly sliced) PAA vector.
///
/// SAX codes are levels in [1, alpha]. Improved-SAX codes are
/// 2*alpha - phi*level with phi in {-1, 0, +1}, hence in [alpha, 3*alpha].
struct IsaxSequence {
  std::vector<int> symbols;
  int alpha = 0;
  Encoding encoding = Encoding::isax;

  std::size_t size() const noexcept { return symbols.size(); }
};

/// Throws ParameterError when alpha < 2.
Breakpoints gaussian_breakpoints(int alpha);

/// Bin index l in [1, alpha] with beta_{l-1} <= value < beta_l; a value equal
/// to a breakpoint lands in the upper bin.
int sax_level(double value, const Breakpoints& bp);

IsaxSequence sax_symbolize(std::span<const double> paa_values, const Breakpoints& bp);
IsaxSequence sax_symbolize(const PaaVector& paa, const Breakpoints& bp);

/// Throws ParameterError when `paa_values` and `signs` differ in length.
IsaxSequence isax_symbolize(std::span<const double> paa_values,
                            std::span<const std::int8_t> signs, const Breakpoints& bp);
IsaxSequence isax_symbolize(const PaaVector& paa, const TrendSigns& phi,
                            const Breakpoints& bp);

/// Multiset Jaccard |A n B| / |A u B| over symbol codes; 1 when both are
/// empty. Throws ParameterError on mismatched alphabet or encoding.
double jaccard_similarity(const IsaxSequence& a, const IsaxSequence& b);

/// Gathers `values[i]` for each i in `indices` (which must be in range).
template <typename T>
std::vector<T> gather(std::span<const T> values, std::span<const std::size_t> indices) {
  std::vector<T> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(values[i]);
  return out;
}

}  // namespace kpiroot
