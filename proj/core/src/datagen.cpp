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

#include "kpiroot/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "kpiroot/error.hpp"
#include "kpiroot/series_io.hpp"

namespace kpiroot {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::int64_t kStartTime = 1'700'000'000;
constexpr std::int64_t kInterval = 60;

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// One candidate's benign behaviour: level + two-harmonic cycle.
struct CandidateShape {
  double level = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double harmonic_phase = 0.0;
  double noise = 0.0;
};

std::vector<double> cycle_template(const CandidateShape& c, std::size_t n, std::size_t period) {
  std::vector<double> s(n);
  const double omega = kTwoPi / static_cast<double>(period);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = omega * static_cast<double>(t);
    s[t] = c.amplitude * (std::sin(x + c.phase) + 0.3 * std::sin(2.0 * x + c.harmonic_phase));
  }
  return s;
}

AnomalyKind sample_kind(Rng& rng, const std::array<double, 3>& weights) {
  std::discrete_distribution<int> dist(weights.begin(), weights.end());
  return static_cast<AnomalyKind>(dist(rng));
}

std::string candidate_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "vm%04zu", i);
  return buf;
}

// Magnitude (in cycle amplitudes) and duration for one injected anomaly.
struct AnomalyDraw {
  double magnitude = 0.0;
  std::size_t duration = 0;
};

AnomalyDraw draw_anomaly(Rng& rng, AnomalyKind kind, std::size_t n, std::size_t period) {
  switch (kind) {
    case AnomalyKind::trend_shift:
      return {uniform(rng, 6.0, 10.0), uniform_index(rng, n / 10, n / 5)};
    case AnomalyKind::seasonal_deviation:
      return {uniform(rng, 8.0, 14.0), uniform_index(rng, 6 * period, 9 * period)};
    case AnomalyKind::residual_spike:
      return {uniform(rng, 15.0, 25.0),
              uniform_index(rng, std::max<std::size_t>(3, n / 40), std::max<std::size_t>(6, n / 20))};
  }
  return {};
}

}  // namespace

std::string_view to_string(AnomalyKind kind) {
  switch (kind) {
    case AnomalyKind::trend_shift: return "trend_shift";
    case AnomalyKind::seasonal_deviation: return "seasonal_deviation";
    case AnomalyKind::residual_spike: return "residual_spike";
  }
  return "trend_shift";
}

AnomalyKind anomaly_kind_from_string(std::string_view name) {
  if (name == "trend_shift") return AnomalyKind::trend_shift;
  if (name == "seasonal_deviation") return AnomalyKind::seasonal_deviation;
  if (name == "residual_spike") return AnomalyKind::residual_spike;
  throw ParameterError("unknown anomaly kind '" + std::string(name) + "'");
}

void ScenarioSpec::validate() const {
  if (m < 2) throw ParameterError("scenario needs at least two candidates");
  if (period < 2) throw ParameterError("scenario period must be >= 2");
  if (n < 4 * period) throw ParameterError("scenario length must cover at least four periods");
  if (num_root_causes != 0 && num_root_causes >= m) {
    throw ParameterError("root-cause count must be < m");
  }
  if (num_root_causes == 0 &&
      (min_root_causes < 1 || min_root_causes > max_root_causes || max_root_causes >= m)) {
    throw ParameterError("root-cause range must satisfy 1 <= min <= max < m");
  }
  if (10 * lag_delta >= n) throw ParameterError("lag_delta must be < n / 10");
  if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
  const double total = kind_weights[0] + kind_weights[1] + kind_weights[2];
  if (!(total > 0.0) || *std::min_element(kind_weights.begin(), kind_weights.end()) < 0.0) {
    throw ParameterError("anomaly kind weights must be non-negative with a positive sum");
  }
}

InjectedSeries inject_anomaly(std::span<const double> series, AnomalyKind kind, std::size_t t0,
                              double magnitude, std::size_t duration,
                              std::span<const double> seasonal_template,
                              std::span<const double> replacement) {
  if (duration == 0 || t0 + duration > series.size()) {
    throw ParameterError("anomaly window [" + std::to_string(t0) + ", " +
                         std::to_string(t0 + duration) + ") overflows a series of length " +
                         std::to_string(series.size()));
  }
  InjectedSeries out{{series.begin(), series.end()}, {t0, t0 + duration}};
  switch (kind) {
    case AnomalyKind::trend_shift:
      for (std::size_t t = t0; t < t0 + duration; ++t) out.values[t] += magnitude;
      break;
    case AnomalyKind::residual_spike: {
      const double rate = 3.0 / static_cast<double>(duration);
      for (std::size_t j = 0; j < duration; ++j) {
        out.values[t0 + j] += magnitude * std::exp(-rate * static_cast<double>(j));
      }
      break;
    }
    case AnomalyKind::seasonal_deviation: {
      if (seasonal_template.size() != series.size() ||
          (!replacement.empty() && replacement.size() != series.size())) {
        throw ParameterError("seasonal deviation needs templates of the series length");
      }
      if (replacement.empty()) {
        double peak = 0.0;
        for (double v : seasonal_template) peak = std::max(peak, std::abs(v));
        const double gain = peak > 0.0 ? magnitude / peak : 0.0;
        for (std::size_t t = t0; t < t0 + duration; ++t) {
          out.values[t] -= (1.0 + gain) * seasonal_template[t];
        }
      } else {
        for (std::size_t t = t0; t < t0 + duration; ++t) {
          out.values[t] += magnitude * replacement[t] - seasonal_template[t];
        }
      }
      break;
    }
  }
  return out;
}

std::vector<double> deviation_cycle(std::size_t n, std::size_t period, double phase) {
  std::vector<double> c(n);
  const double omega = kTwoPi / (6.0 * static_cast<double>(period));
  for (std::size_t t = 0; t < n; ++t) c[t] = std::sin(omega * static_cast<double>(t) + phase);
  return c;
}

LabeledDataset generate_scenario(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const std::size_t n = spec.n;
  const std::size_t m = spec.m;
  const std::size_t period = spec.period;

  std::vector<CandidateShape> shapes(m);
  std::vector<double> weights(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto& c = shapes[i];
    c.amplitude = uniform(rng, 0.5, 1.5);
    c.level = c.amplitude * uniform(rng, 4.0, 8.0);
    c.phase = uniform(rng, 0.0, kTwoPi);
    c.harmonic_phase = uniform(rng, 0.0, kTwoPi);
    c.noise = spec.noise_sigma * c.amplitude;
    weights[i] = std::exp(uniform(rng, std::log(0.5), std::log(2.0)));
  }

  std::size_t k = spec.num_root_causes;
  if (k == 0) k = uniform_index(rng, spec.min_root_causes, spec.max_root_causes);
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> roots(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(roots.begin(), roots.end());

  const AnomalyKind kind = sample_kind(rng, spec.kind_weights);
  const double direction = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
  const AnomalyDraw base = draw_anomaly(rng, kind, n, period);
  const auto replacement = deviation_cycle(n, period, uniform(rng, 0.0, kTwoPi));
  const std::size_t max_duration = base.duration + base.duration / 5 + 1;
  const std::size_t t0 =
      uniform_index(rng, n / 4, n - max_duration - spec.lag_delta - n / 10);

  // The alarm is a placeholder until the aggregate is complete.
  LabeledDataset ds{{}, spec, KpiSeries("alarm", {0.0, 0.0}), {}, {}, {}, {}, {}};
  ds.spec = spec;
  ds.spec.num_root_causes = k;
  ds.incident_id = "scenario-" + std::to_string(spec.seed);
  ds.weights = weights;

  const double weight_sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> alarm(n, 0.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<KpiSeries> candidates;
  candidates.reserve(m);
  std::size_t next_root = 0;
  double mean_amplitude = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = shapes[i];
    mean_amplitude += c.amplitude / static_cast<double>(m);
    const auto cycle = cycle_template(c, n, period);
    std::vector<double> values(n);
    for (std::size_t t = 0; t < n; ++t) values[t] = c.level + cycle[t] + c.noise * gauss(rng);
    for (std::size_t t = 0; t < n; ++t) alarm[t] += weights[i] * values[t] / weight_sum;

    const std::string id = candidate_id(i);
    if (next_root < roots.size() && roots[next_root] == i) {
      ++next_root;
      const double jitter = uniform(rng, 0.8, 1.2);
      const auto duration = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::llround(static_cast<double>(base.duration) * jitter)));
      const double magnitude =
          (kind == AnomalyKind::seasonal_deviation ? 1.0 : direction) * base.magnitude *
          uniform(rng, 0.8, 1.2) * c.amplitude;
      auto injected = inject_anomaly(values, kind, t0, magnitude, duration, cycle, replacement);
      // The root cause's change reaches the alarm lag_delta samples later.
      for (std::size_t t = t0; t < t0 + duration; ++t) {
        const double delta = injected.values[t] - values[t];
        alarm[t + spec.lag_delta] += weights[i] * delta / weight_sum;
      }
      values = std::move(injected.values);
      ds.truth.root_causes.insert(id);
      ds.injections.push_back({id, kind, injected.window, magnitude});
    }
    candidates.emplace_back(id, std::move(values), kStartTime, kInterval);
  }

  const double alarm_noise = spec.noise_sigma * mean_amplitude / std::sqrt(static_cast<double>(m));
  for (double& v : alarm) v += alarm_noise * gauss(rng);

  for (const auto& inj : ds.injections) {
    ds.alarm_windows.push_back({inj.window.start + spec.lag_delta, inj.window.end + spec.lag_delta});
  }
  std::sort(ds.alarm_windows.begin(), ds.alarm_windows.end(),
            [](const LabelWindow& a, const LabelWindow& b) { return a.start < b.start; });
  std::vector<LabelWindow> merged;
  for (const auto& w : ds.alarm_windows) {
    if (!merged.empty() && w.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, w.end);
    } else {
      merged.push_back(w);
    }
  }
  ds.alarm_windows = std::move(merged);

  ds.truth.incident_id = ds.incident_id;
  ds.alarm = KpiSeries("alarm", std::move(alarm), kStartTime, kInterval);
  ds.candidates = std::move(candidates);
  return ds;
}

DetectionCase generate_detection_case(const DetectionCaseSpec& spec) {
  if (spec.period < 2 || spec.n < 8 * spec.period) {
    throw ParameterError("detection case needs at least eight periods");
  }
  if (spec.anomalies == 0) throw ParameterError("detection case needs at least one anomaly");
  Rng rng(spec.seed);
  CandidateShape c;
  c.amplitude = 1.0;
  c.level = uniform(rng, 4.0, 8.0);
  c.phase = uniform(rng, 0.0, kTwoPi);
  c.harmonic_phase = uniform(rng, 0.0, kTwoPi);
  c.noise = spec.noise_sigma;
  const auto cycle = cycle_template(c, spec.n, spec.period);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> values(spec.n);
  for (std::size_t t = 0; t < spec.n; ++t) values[t] = c.level + cycle[t] + c.noise * gauss(rng);

  // Anomalies sit in disjoint slots, one per slot, kinds rotating from a
  // random offset so every kind appears across a suite.
  const std::size_t margin = 2 * spec.period;
  const std::size_t usable = spec.n - 2 * margin;
  const std::size_t slot = usable / spec.anomalies;
  const auto first_kind = uniform_index(rng, 0, 2);
  DetectionCase out{KpiSeries("detect", {0.0, 0.0}), {}, {}};
  for (std::size_t a = 0; a < spec.anomalies; ++a) {
    const auto kind = static_cast<AnomalyKind>((first_kind + a) % 3);
    AnomalyDraw draw = draw_anomaly(rng, kind, spec.n, spec.period);
    draw.duration = std::min(draw.duration, slot / 2);
    const std::size_t lo = margin + a * slot;
    const std::size_t t0 = uniform_index(rng, lo, lo + slot - draw.duration - 1);
    const double sign = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
    const double magnitude =
        kind == AnomalyKind::seasonal_deviation ? draw.magnitude : sign * draw.magnitude;
    const auto replacement = deviation_cycle(spec.n, spec.period, uniform(rng, 0.0, kTwoPi));
    auto injected =
        inject_anomaly(values, kind, t0, magnitude, draw.duration, cycle, replacement);
    values = std::move(injected.values);
    out.windows.push_back(injected.window);
    out.kinds.push_back(kind);
  }
  out.series = KpiSeries("detect-" + std::to_string(spec.seed), std::move(values), kStartTime,
                         kInterval);
  return out;
}

nlohmann::ordered_json to_json(const ScenarioSpec& spec) {
  nlohmann::ordered_json j;
  j["m"] = spec.m;
  j["n"] = spec.n;
  j["period"] = spec.period;
  j["num_root_causes"] = spec.num_root_causes;
  j["min_root_causes"] = spec.min_root_causes;
  j["max_root_causes"] = spec.max_root_causes;
  j["lag_delta"] = spec.lag_delta;
  j["noise_sigma"] = spec.noise_sigma;
  j["kind_weights"] = {{"trend_shift", spec.kind_weights[0]},
                       {"seasonal_deviation", spec.kind_weights[1]},
                       {"residual_spike", spec.kind_weights[2]}};
  j["seed"] = spec.seed;
  return j;
}

ScenarioSpec scenario_spec_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  try {
    spec.m = j.value("m", spec.m);
    spec.n = j.value("n", spec.n);
    spec.period = j.value("period", spec.period);
    spec.num_root_causes = j.value("num_root_causes", spec.num_root_causes);
    spec.min_root_causes = j.value("min_root_causes", spec.min_root_causes);
    spec.max_root_causes = j.value("max_root_causes", spec.max_root_causes);
    spec.lag_delta = j.value("lag_delta", spec.lag_delta);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("kind_weights")) {
      const auto& w = j.at("kind_weights");
      spec.kind_weights = {w.value("trend_shift", 0.0), w.value("seasonal_deviation", 0.0),
                           w.value("residual_spike", 0.0)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid scenario spec: ") + e.what());
  }
  return spec;
}

void write_dataset(const LabeledDataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json manifest;
  manifest["format"] = "kpiroot.dataset";
  manifest["version"] = 1;
  manifest["incident_id"] = ds.incident_id;
  manifest["spec"] = to_json(ds.spec);
  manifest["alarm"] = {{"id", ds.alarm.id()}, {"file", "alarm.csv"}};
  write_kpi_csv(dir / "alarm.csv", ds.alarm);

  auto candidates = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < ds.candidates.size(); ++i) {
    const auto& c = ds.candidates[i];
    const std::string file = c.id() + ".csv";
    write_kpi_csv(dir / file, c);
    candidates.push_back({{"id", c.id()}, {"file", file}, {"weight", ds.weights[i]}});
  }
  manifest["candidates"] = std::move(candidates);
  manifest["truth"] = ds.truth.root_causes;

  auto injections = nlohmann::ordered_json::array();
  for (const auto& inj : ds.injections) {
    injections.push_back({{"series", inj.series_id},
                          {"kind", to_string(inj.kind)},
                          {"start", inj.window.start},
                          {"end", inj.window.end},
                          {"magnitude", inj.magnitude}});
  }
  manifest["injections"] = std::move(injections);
  auto windows = nlohmann::ordered_json::array();
  for (const auto& w : ds.alarm_windows) windows.push_back({{"start", w.start}, {"end", w.end}});
  manifest["alarm_windows"] = std::move(windows);

  std::ofstream out(dir / "manifest.json");
  if (!out) throw ParseError("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

DatasetManifest read_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw ParseError("cannot open " + manifest_path.string());
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    const auto dir = manifest_path.parent_path();
    m.incident_id = j.at("incident_id").get<std::string>();
    m.alarm_id = j.at("alarm").at("id").get<std::string>();
    m.alarm_file = dir / j.at("alarm").at("file").get<std::string>();
    for (const auto& c : j.at("candidates")) {
      m.candidate_ids.push_back(c.at("id").get<std::string>());
      m.candidate_files.push_back(dir / c.at("file").get<std::string>());
    }
    if (j.contains("spec")) m.period = j.at("spec").value("period", std::size_t{0});
    m.truth.incident_id = m.incident_id;
    if (j.contains("truth")) {
      for (const auto& id : j.at("truth")) m.truth.root_causes.insert(id.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid manifest: ") + e.what(), 0, manifest_path.string());
  }
  return m;
}

LoadedDataset load_dataset(const std::filesystem::path& dir) {
  DatasetManifest manifest;
  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    manifest = read_manifest(manifest_path);
  } else {
    if (!std::filesystem::exists(dir / "alarm.csv")) {
      throw ParseError("no manifest.json or alarm.csv in " + dir.string());
    }
    manifest.incident_id = dir.filename().string();
    manifest.alarm_id = "alarm";
    manifest.alarm_file = dir / "alarm.csv";
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() == ".csv" && entry.path().filename() != "alarm.csv") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      manifest.candidate_ids.push_back(f.stem().string());
      manifest.candidate_files.push_back(f);
    }
    manifest.truth.incident_id = manifest.incident_id;
  }

  KpiSeries alarm = read_kpi_csv(manifest.alarm_file, manifest.alarm_id);
  std::vector<KpiSeries> candidates;
  candidates.reserve(manifest.candidate_files.size());
  for (std::size_t i = 0; i < manifest.candidate_files.size(); ++i) {
    candidates.push_back(read_kpi_csv(manifest.candidate_files[i], manifest.candidate_ids[i]));
  }
  return {std::move(manifest), std::move(alarm), std::move(candidates)};
}

}  // namespace kpiroot
