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

#include "kpiroot/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "kpiroot/error.hpp"

namespace kpiroot {

std::string_view to_string(Encoding encoding) {
  return encoding == Encoding::sax ? "sax" : "isax";
}

Encoding encoding_from_string(std::string_view name) {
  if (name == "sax") return Encoding::sax;
  if (name == "isax") return Encoding::isax;
  throw ParameterError("unknown encoding '" + std::string(name) + "'");
}

Breakpoints gaussian_breakpoints(int alpha) {
  if (alpha < 2) throw ParameterError("alphabet size must be >= 2");
  Breakpoints bp;
  bp.alpha = alpha;
  bp.betas.reserve(static_cast<std::size_t>(alpha - 1));
  for (int k = 1; k < alpha; ++k) {
    const double p = static_cast<double>(k) / alpha;
    bp.betas.push_back(std::sqrt(2.0) * boost::math::erf_inv(2.0 * p - 1.0));
  }
  return bp;
}

int sax_level(double value, const Breakpoints& bp) {
  const auto above = std::upper_bound(bp.betas.begin(), bp.betas.end(), value);
  return 1 + static_cast<int>(above - bp.betas.begin());
}

IsaxSequence sax_symbolize(std::span<const double> paa_values, const Breakpoints& bp) {
  IsaxSequence out{{}, bp.alpha, Encoding::sax};
  out.symbols.reserve(paa_values.size());
  for (double p : paa_values) out.symbols.push_back(sax_level(p, bp));
  return out;
}

IsaxSequence sax_symbolize(const PaaVector& paa, const Breakpoints& bp) {
  return sax_symbolize(paa.values, bp);
}

IsaxSequence isax_symbolize(std::span<const double> paa_values,
                            std::span<const std::int8_t> signs, const Breakpoints& bp) {
  if (paa_values.size() != signs.size()) {
    throw ParameterError("isax_symbolize: " + std::to_string(paa_values.size()) +
                         " PAA values but " + std::to_string(signs.size()) + " trend signs");
  }
  IsaxSequence out{{}, bp.alpha, Encoding::isax};
  out.symbols.reserve(paa_values.size());
  for (std::size_t i = 0; i < paa_values.size(); ++i) {
    out.symbols.push_back(2 * bp.alpha - signs[i] * sax_level(paa_values[i], bp));
  }
  return out;
}

IsaxSequence isax_symbolize(const PaaVector& paa, const TrendSigns& phi, const Breakpoints& bp) {
  return isax_symbolize(paa.values, phi.signs, bp);
}

double jaccard_similarity(const IsaxSequence& a, const IsaxSequence& b) {
  if (a.alpha != b.alpha || a.encoding != b.encoding) {
    throw ParameterError("jaccard_similarity: sequences use different alphabets or encodings");
  }
  if (a.symbols.empty() && b.symbols.empty()) return 1.0;

  // Codes are bounded by 3 * alpha, so dense counters are enough.
  const std::size_t span = static_cast<std::size_t>(3 * a.alpha) + 1;
  std::vector<int> ca(span, 0);
  std::vector<int> cb(span, 0);
  for (int s : a.symbols) ++ca[static_cast<std::size_t>(s)];
  for (int s : b.symbols) ++cb[static_cast<std::size_t>(s)];
  long inter = 0;
  long uni = 0;
  for (std::size_t c = 0; c < span; ++c) {
    inter += std::min(ca[c], cb[c]);
    uni += std::max(ca[c], cb[c]);
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace kpiroot
