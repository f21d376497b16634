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

#include "kpiroot/causality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kRidgeFactor = 1e-8;

// Regresses y[t] (t = q .. n-1) on an intercept plus q lags of each input.
ArFit fit_lagged(std::span<const double> y, std::span<const double> x, std::size_t q) {
  const std::size_t n = y.size();
  const std::size_t inputs = x.empty() ? 1 : 2;
  const std::size_t cols = 1 + inputs * q;
  const std::size_t rows = n - q;

  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd target(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + q;
    target(r) = y[t];
    design(r, 0) = 1.0;
    for (std::size_t j = 1; j <= q; ++j) {
      design(r, j) = y[t - j];
      if (!x.empty()) design(r, q + j) = x[t - j];
    }
  }

  Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::VectorXd rhs = design.transpose() * target;

  ArFit fit;
  fit.order = q;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxCondition) {
    gram.diagonal().array() += kRidgeFactor * gram.trace();
    fit.regularized = true;
  }
  const Eigen::VectorXd beta = gram.ldlt().solve(rhs);
  const Eigen::VectorXd resid = target - design * beta;

  fit.coefficients.assign(beta.data(), beta.data() + beta.size());
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  fit.rss = resid.squaredNorm();
  return fit;
}

void require_length(std::size_t n, std::size_t q) {
  if (q == 0) throw ParameterError("autoregressive order must be >= 1");
  if (n <= 2 * q + 1) {
    throw InsufficientDataError("autoregression of order " + std::to_string(q) + " needs more than " +
                                std::to_string(2 * q + 1) + " points, got " + std::to_string(n));
  }
}

double centered_ss(std::span<const double> v) {
  double mean = 0.0;
  for (double e : v) mean += e;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double e : v) ss += (e - mean) * (e - mean);
  return ss;
}

}  // namespace

ArFit fit_ar(std::span<const double> y, std::size_t q) {
  require_length(y.size(), q);
  return fit_lagged(y, {}, q);
}

ArFit fit_arx(std::span<const double> y, std::span<const double> x, std::size_t q) {
  if (x.size() != y.size()) throw ParameterError("fit_arx: series lengths differ");
  require_length(y.size(), q);
  return fit_lagged(y, x, q);
}

GrangerResult granger_f(std::span<const double> y_alarm, std::span<const double> x_candidate,
                        const AnomalySegment& segment, std::size_t q,
                        const GrangerOptions& options) {
  if (segment.start >= segment.end || segment.end > y_alarm.size() ||
      segment.end > x_candidate.size()) {
    throw ParameterError("granger_f: segment outside the series");
  }
  const std::size_t len = segment.size();
  if (q == 0) throw ParameterError("granger_f: lag must be >= 1");
  if (len < 2 * q + 2) {
    throw InsufficientDataError("granger_f: segment of " + std::to_string(len) +
                                " points leaves no degrees of freedom for lag " + std::to_string(q));
  }
  const auto y = y_alarm.subspan(segment.start, len);
  const auto x = x_candidate.subspan(segment.start, len);

  GrangerResult res;
  res.df1 = q;
  res.df2 = len - 2 * q - 1;
  res.restricted_rss = fit_ar(y, q).rss;
  res.unrestricted_rss = fit_arx(y, x, q).rss;

  const double tol = options.exact_fit_rss * std::max(1.0, centered_ss(y.subspan(q)));
  if (res.unrestricted_rss < tol) {
    res.f_statistic = res.restricted_rss < tol ? 0.0 : options.f_max;
    return res;
  }
  const double gain = std::max(0.0, res.restricted_rss - res.unrestricted_rss);
  const double f = (gain / static_cast<double>(res.df1)) /
                   (res.unrestricted_rss / static_cast<double>(res.df2));
  res.f_statistic = std::min(f, options.f_max);
  return res;
}

}  // namespace kpiroot
