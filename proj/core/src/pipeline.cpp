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

#include "kpiroot/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <future>
#include <mutex>
#include <thread>

#include "kpiroot/causality.hpp"
#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

// Runs fn(i) for i in [0, count) on `jobs` threads. Each index is handled
// exactly once; the first exception is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  threads.reserve(jobs - 1);
  for (std::size_t t = 1; t < jobs; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

class StageClock {
 public:
  explicit StageClock(std::vector<StageTiming>& out) : out_(out) {}

  void lap(std::string stage) {
    const auto now = std::chrono::steady_clock::now();
    out_.push_back({std::move(stage), std::chrono::duration<double>(now - last_).count()});
    last_ = now;
  }

 private:
  std::vector<StageTiming>& out_;
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

std::vector<std::size_t> reconstruction_flags(std::span<const double> component,
                                              const DetectorConfig& dc, std::size_t window,
                                              std::uint64_t seed_offset) {
  auto ae = dc.autoencoder(window);
  ae.seed = dc.seed + seed_offset;
  const auto detector = train_reconstruction_detector(component, ae);
  return detect_component_anomalies(component, detector);
}

std::vector<std::size_t> merge_sorted(std::vector<std::size_t> a, std::span<const std::size_t> b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Everything the scoring stages need from one candidate.
struct CandidateView {
  PaaVector paa;
  TrendSigns signs;
  double similarity = 0.0;
  double causality = 0.0;
  std::string warning;
};

}  // namespace

std::string_view to_string(DetectionMode mode) {
  return mode == DetectionMode::trend_only ? "trend_only" : "decomposition";
}

DetectionMode detection_mode_from_string(std::string_view name) {
  if (name == "decomposition") return DetectionMode::decomposition;
  if (name == "trend_only") return DetectionMode::trend_only;
  throw ParameterError("unknown detection mode '" + std::string(name) + "'");
}

std::string_view to_string(CausalityScaling scaling) {
  return scaling == CausalityScaling::raw ? "raw" : "min_max";
}

CausalityScaling causality_scaling_from_string(std::string_view name) {
  if (name == "min_max") return CausalityScaling::min_max;
  if (name == "raw") return CausalityScaling::raw;
  throw ParameterError("unknown causality scaling '" + std::string(name) + "'");
}

std::size_t RunConfig::resolved_w(std::size_t n) const {
  const std::size_t chosen = w != 0 ? w : default_word_size(n);
  if (chosen > n) {
    throw ParameterError("PAA size " + std::to_string(chosen) + " exceeds series length " +
                         std::to_string(n));
  }
  return chosen;
}

StlConfig RunConfig::stl() const {
  StlConfig c = StlConfig::for_period(period);
  c.seasonal_window = seasonal_window;
  c.trend_window = trend_window;
  return c;
}

DetectorConfig RunConfig::detector() const {
  DetectorConfig d;
  d.gamma = gamma;
  d.lag_l = lag_l;
  d.sigma_k = sigma_k;
  d.window_length = window_length;
  d.epochs = epochs;
  d.learning_rate = learning_rate;
  d.seed = seed;
  d.train_stride = train_stride;
  d.ae_threshold_rule = ae_threshold_rule;
  d.ae_threshold_k = ae_threshold_k;
  return d;
}

void RunConfig::validate() const {
  if (alpha < 2) throw ParameterError("alpha must be >= 2");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (q < 1) throw ParameterError("lag order q must be >= 1");
  if (jobs < 1) throw ParameterError("jobs must be >= 1");
  policy.validate();
  detector().validate();
  if (detection == DetectionMode::decomposition) {
    if (period < 2) throw ParameterError("decomposition needs --period >= 2");
    stl().validate();
  }
}

std::vector<std::string> LocalizationReport::ranked_ids() const {
  std::vector<std::string> ids;
  ids.reserve(ranking.size());
  for (const auto& s : ranking) ids.push_back(s.kpi_id);
  return ids;
}

AlarmDetection detect_alarm(const KpiSeries& alarm, const RunConfig& cfg) {
  cfg.validate();
  AlarmDetection out;
  out.mode = cfg.detection;
  out.normalized = znormalize(alarm);
  if (out.normalized.source_std == 0.0 || cfg.detection == DetectionMode::trend_only) {
    return out;
  }

  const auto dc = cfg.detector();
  out.decomposition = stl_decompose(out.normalized.values, cfg.stl());
  const auto& d = out.decomposition;

  auto trend_task = [&] { return reconstruction_flags(d.trend, dc, cfg.window_length, 0); };
  auto seasonal_task = [&] { return reconstruction_flags(d.seasonal, dc, cfg.period, 1); };
  auto residual_task = [&] {
    return merge_sorted(reconstruction_flags(d.residual, dc, cfg.window_length, 2),
                        robust_sigma_detect(d.residual, cfg.sigma_k));
  };

  if (cfg.jobs > 1) {
    auto seasonal = std::async(std::launch::async, seasonal_task);
    auto residual = std::async(std::launch::async, residual_task);
    out.trend_idx = trend_task();
    out.seasonal_idx = seasonal.get();
    out.residual_idx = residual.get();
  } else {
    out.trend_idx = trend_task();
    out.seasonal_idx = seasonal_task();
    out.residual_idx = residual_task();
  }
  return out;
}

SegmentDetection detect_segments(const AlarmDetection& detection, const RunConfig& cfg) {
  const auto& z = detection.normalized.values;
  const std::size_t w = cfg.resolved_w(z.size());
  SegmentDetection out;
  out.alarm_paa = paa(z, w);
  out.alarm_signs = trend_signs(z, out.alarm_paa);
  if (detection.normalized.source_std == 0.0) return out;

  // The trend-ratio rule needs the PAA of the series it watches: the STL
  // trend in decomposition mode, the alarm itself otherwise.
  const bool decomposed = detection.mode == DetectionMode::decomposition;
  std::vector<std::size_t> overload_samples;
  if (!decomposed || cfg.trend_ratio_in_fusion) {
    const PaaVector watched =
        decomposed ? paa(detection.decomposition.trend, w) : out.alarm_paa;
    overload_samples =
        segment_samples(detect_trend_overload(watched, cfg.detector()), out.alarm_paa);
  }

  const auto trend = merge_sorted(detection.trend_idx, overload_samples);
  out.sample_indices = fuse_anomaly_indices(trend, detection.seasonal_idx, detection.residual_idx);
  out.paa_indices = to_segment_indices(out.sample_indices, out.alarm_paa);
  // Both regressions fit t in [t_s + q, t_e) with up to 2q + 1 coefficients;
  // 4q + 2 points leave q + 1 residual degrees of freedom.
  out.segments = segments_from_indices(out.paa_indices, cfg.max_gap, 4 * cfg.q + 2, w);
  return out;
}

LocalizationReport localize(const KpiSeries& alarm, std::span<const KpiSeries> candidates,
                            const RunConfig& cfg, const AlarmDetection* cached) {
  cfg.validate();
  if (candidates.empty()) throw ParameterError("no candidate series");
  for (const auto& c : candidates) {
    if (c.size() != alarm.size()) {
      throw ParameterError("candidate '" + c.id() + "' has " + std::to_string(c.size()) +
                           " samples, alarm has " + std::to_string(alarm.size()));
    }
  }

  LocalizationReport report;
  report.config = cfg;
  report.n = alarm.size();
  report.m = candidates.size();
  report.w = cfg.resolved_w(alarm.size());
  StageClock clock(report.timings);

  AlarmDetection fresh;
  if (cached == nullptr || cached->mode != cfg.detection) {
    fresh = detect_alarm(alarm, cfg);
    cached = &fresh;
  }
  const SegmentDetection seg = detect_segments(*cached, cfg);
  report.anomaly_indices = seg.paa_indices;
  report.segments = seg.segments;
  clock.lap("detection");
  if (seg.segments.empty()) {
    report.warnings.push_back("no anomaly detected on the alarm series");
    return report;
  }

  const std::size_t m = candidates.size();
  std::vector<CandidateView> views(m);
  parallel_for(m, cfg.jobs, [&](std::size_t i) {
    const auto z = znormalize(candidates[i]);
    views[i].paa = paa(z.values, report.w);
    views[i].signs = trend_signs(z.values, views[i].paa);
  });
  clock.lap("reduction");

  const auto bp = gaussian_breakpoints(cfg.alpha);
  auto symbolize = [&](const PaaVector& p, const TrendSigns& s) {
    const auto values = gather<double>(p.values, seg.paa_indices);
    if (cfg.encoding == Encoding::sax) return sax_symbolize(values, bp);
    const auto signs = gather<std::int8_t>(s.signs, seg.paa_indices);
    return isax_symbolize(values, signs, bp);
  };
  const auto alarm_symbols = symbolize(seg.alarm_paa, seg.alarm_signs);
  parallel_for(m, cfg.jobs, [&](std::size_t i) {
    views[i].similarity = jaccard_similarity(alarm_symbols, symbolize(views[i].paa, views[i].signs));
  });
  clock.lap("symbolic_similarity");

  parallel_for(m, cfg.jobs, [&](std::size_t i) {
    double best = 0.0;
    for (const auto& s : seg.segments) {
      try {
        best = std::max(best,
                        granger_f(seg.alarm_paa.values, views[i].paa.values, s, cfg.q).f_statistic);
      } catch (const InsufficientDataError& e) {
        views[i].warning = candidates[i].id() + ": " + e.what();
      }
    }
    views[i].causality = best;
  });
  clock.lap("causality");

  std::vector<double> raw(m);
  for (std::size_t i = 0; i < m; ++i) {
    raw[i] = views[i].causality;
    if (!views[i].warning.empty()) report.warnings.push_back(views[i].warning);
  }
  const auto scaled = cfg.causality_scaling == CausalityScaling::min_max ? scale_causality(raw) : raw;

  std::vector<CorrelationScore> scores(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& s = scores[i];
    s.kpi_id = candidates[i].id();
    s.similarity = views[i].similarity;
    s.causality_raw = raw[i];
    s.causality_scaled = scaled[i];
    s.combined = cfg.causality_scaling == CausalityScaling::min_max
                     ? correlation_score(s.similarity, s.causality_scaled, cfg.lambda)
                     : cfg.lambda * s.similarity + (1.0 - cfg.lambda) * s.causality_raw;
  }
  report.ranking = rank_candidates(std::move(scores));
  report.predicted = select_root_causes(report.ranking, cfg.policy);
  clock.lap("scoring");
  return report;
}

}  // namespace kpiroot
