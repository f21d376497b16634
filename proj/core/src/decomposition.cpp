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

#include "kpiroot/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

// Local fit at abscissa `xv` over the `span` nearest of the points 0..n-1.
// Returns false when every neighbourhood weight vanished.
bool loess_at(std::span<const double> y, std::span<const double> rw, std::size_t span,
              int degree, double xv, double& out) {
  const std::size_t n = y.size();
  std::size_t left = 0;
  std::size_t right = n - 1;
  if (span < n) {
    const double centered = std::round(xv) - static_cast<double>(span / 2);
    const double max_left = static_cast<double>(n - span);
    left = static_cast<std::size_t>(std::clamp(centered, 0.0, max_left));
    right = left + span - 1;
  }
  double h = std::max(xv - static_cast<double>(left), static_cast<double>(right) - xv);
  if (span > n) h += static_cast<double>((span - n) / 2);

  const double h_near = 0.001 * h;
  const double h_far = 0.999 * h;
  double wsum = 0.0;
  // Small neighbourhoods dominate; a stack buffer would be premature.
  thread_local std::vector<double> w;
  w.assign(right - left + 1, 0.0);
  for (std::size_t j = left; j <= right; ++j) {
    const double r = std::abs(static_cast<double>(j) - xv);
    double wj = 0.0;
    if (r <= h_far) {
      if (r <= h_near || h <= 0.0) {
        wj = 1.0;
      } else {
        const double u = r / h;
        const double t = 1.0 - u * u * u;
        wj = t * t * t;
      }
      if (!rw.empty()) wj *= rw[j];
    }
    w[j - left] = wj;
    wsum += wj;
  }
  if (wsum <= 0.0) return false;
  for (double& wj : w) wj /= wsum;

  if (degree == 1 && h > 0.0) {
    double xbar = 0.0;
    for (std::size_t j = left; j <= right; ++j) xbar += w[j - left] * static_cast<double>(j);
    double c = 0.0;
    for (std::size_t j = left; j <= right; ++j) {
      const double d = static_cast<double>(j) - xbar;
      c += w[j - left] * d * d;
    }
    const double range = static_cast<double>(n - 1);
    if (std::sqrt(c) > 0.001 * range) {
      const double b = (xv - xbar) / c;
      for (std::size_t j = left; j <= right; ++j) {
        w[j - left] *= b * (static_cast<double>(j) - xbar) + 1.0;
      }
    }
  }
  double ys = 0.0;
  for (std::size_t j = left; j <= right; ++j) ys += w[j - left] * y[j];
  out = ys;
  return true;
}

// Like loess_smooth but without the span <= n restriction (cycle-subseries
// can be shorter than the seasonal span).
std::vector<double> smooth_at_indices(std::span<const double> y, std::size_t span, int degree,
                                      std::span<const double> rw) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double xv = static_cast<double>(i);
    if (!loess_at(y, rw, span, degree, xv, out[i])) out[i] = y[i];
  }
  return out;
}

std::vector<double> moving_average(std::span<const double> x, std::size_t len) {
  std::vector<double> out(x.size() - len + 1);
  double sum = std::accumulate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len), 0.0);
  out[0] = sum / static_cast<double>(len);
  for (std::size_t i = 1; i < out.size(); ++i) {
    sum += x[i + len - 1] - x[i - 1];
    out[i] = sum / static_cast<double>(len);
  }
  return out;
}

std::size_t smallest_odd_at_least(double v) {
  auto k = static_cast<std::size_t>(std::ceil(v));
  if (k % 2 == 0) ++k;
  return std::max<std::size_t>(k, 3);
}

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double med = v[mid];
  if (v.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  return med;
}

}  // namespace

StlConfig StlConfig::for_period(std::size_t period) {
  StlConfig cfg;
  cfg.period = period;
  cfg.trend_window = cfg.resolved_trend_window();
  return cfg;
}

std::size_t StlConfig::resolved_trend_window() const {
  if (trend_window != 0) return trend_window;
  const double ns = static_cast<double>(seasonal_window);
  return smallest_odd_at_least(1.5 * static_cast<double>(period) / (1.0 - 1.5 / ns));
}

std::size_t StlConfig::lowpass_window() const {
  return smallest_odd_at_least(static_cast<double>(period));
}

void StlConfig::validate() const {
  if (period < 2) throw ParameterError("STL period must be >= 2");
  if (seasonal_window < 3 || seasonal_window % 2 == 0) {
    throw ParameterError("STL seasonal window must be odd and >= 3");
  }
  if (trend_window != 0 && (trend_window < 3 || trend_window % 2 == 0)) {
    throw ParameterError("STL trend window must be odd and >= 3");
  }
  if (inner_iterations < 1) throw ParameterError("STL needs at least one inner iteration");
}

std::vector<double> loess_smooth(std::span<const double> y, std::size_t span, int degree,
                                 std::span<const double> robustness) {
  if (span % 2 == 0) throw ParameterError("Loess span must be odd");
  if (span > y.size()) {
    throw ParameterError("Loess span " + std::to_string(span) + " exceeds series length " +
                         std::to_string(y.size()));
  }
  if (degree != 0 && degree != 1) throw ParameterError("Loess degree must be 0 or 1");
  if (!robustness.empty() && robustness.size() != y.size()) {
    throw ParameterError("Loess robustness weights must match the series length");
  }
  return smooth_at_indices(y, span, degree, robustness);
}

Decomposition stl_decompose(std::span<const double> values, const StlConfig& cfg) {
  cfg.validate();
  const std::size_t n = values.size();
  const std::size_t period = cfg.period;
  if (n < 2 * period) {
    throw InsufficientDataError("STL needs at least two periods (" + std::to_string(2 * period) +
                                " samples), got " + std::to_string(n));
  }
  const std::size_t ns = cfg.seasonal_window;
  const std::size_t nt = cfg.resolved_trend_window();
  const std::size_t nl = cfg.lowpass_window();

  std::vector<double> trend(n, 0.0);
  std::vector<double> seasonal(n, 0.0);
  std::vector<double> rw;  // empty until the first robustness pass
  std::vector<double> detrended(n);
  std::vector<double> cycle(n + 2 * period);
  std::vector<double> sub_y;
  std::vector<double> sub_w;
  std::vector<double> deseasonal(n);

  for (std::size_t outer = 0; outer <= cfg.outer_iterations; ++outer) {
    for (std::size_t inner = 0; inner < cfg.inner_iterations; ++inner) {
      for (std::size_t i = 0; i < n; ++i) detrended[i] = values[i] - trend[i];

      // Cycle-subseries smoothing, extended one cycle past each end.
      for (std::size_t phase = 0; phase < period; ++phase) {
        sub_y.clear();
        sub_w.clear();
        for (std::size_t i = phase; i < n; i += period) {
          sub_y.push_back(detrended[i]);
          if (!rw.empty()) sub_w.push_back(rw[i]);
        }
        const std::size_t k = sub_y.size();
        // A point whose neighbourhood lost all weight keeps its own value;
        // the two extension points copy their inner neighbour.
        for (std::size_t pos = 1; pos <= k; ++pos) {
          double v = sub_y[pos - 1];
          loess_at(sub_y, sub_w, ns, 1, static_cast<double>(pos) - 1.0, v);
          cycle[pos * period + phase] = v;
        }
        for (const std::size_t pos : {std::size_t{0}, k + 1}) {
          double v = cycle[(pos == 0 ? 1 : k) * period + phase];
          loess_at(sub_y, sub_w, ns, 1, static_cast<double>(pos) - 1.0, v);
          cycle[pos * period + phase] = v;
        }
      }

      // Low-pass filter of the cycle series removes leakage into the trend.
      const auto ma1 = moving_average(cycle, period);
      const auto ma2 = moving_average(ma1, period);
      const auto ma3 = moving_average(ma2, 3);
      const auto low = smooth_at_indices(ma3, nl, 1, {});

      for (std::size_t i = 0; i < n; ++i) {
        seasonal[i] = cycle[period + i] - low[i];
        deseasonal[i] = values[i] - seasonal[i];
      }
      trend = smooth_at_indices(deseasonal, nt, 1, rw);
    }

    if (outer < cfg.outer_iterations) {
      std::vector<double> abs_resid(n);
      for (std::size_t i = 0; i < n; ++i) {
        abs_resid[i] = std::abs(values[i] - trend[i] - seasonal[i]);
      }
      const double h = 6.0 * median_of(abs_resid);
      rw.assign(n, 1.0);
      if (h > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          const double u = abs_resid[i] / h;
          if (u <= 0.001) {
            rw[i] = 1.0;
          } else if (u <= 0.999) {
            const double t = 1.0 - u * u;
            rw[i] = t * t;
          } else {
            rw[i] = 0.0;
          }
        }
      }
    }
  }

  const double seasonal_mean =
      std::accumulate(seasonal.begin(), seasonal.end(), 0.0) / static_cast<double>(n);
  Decomposition out;
  out.period = period;
  out.trend = std::move(trend);
  out.seasonal = std::move(seasonal);
  out.residual.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.seasonal[i] -= seasonal_mean;
    out.trend[i] += seasonal_mean;
    out.residual[i] = values[i] - out.trend[i] - out.seasonal[i];
  }
  return out;
}

Decomposition stl_decompose(const KpiSeries& series, const StlConfig& cfg) {
  return stl_decompose(series.values(), cfg);
}

}  // namespace kpiroot
