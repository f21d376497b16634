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

// kpiroot: generate synthetic incidents, detect anomalies, localize root
// causes, evaluate reports and time the pipeline.
//
// Exit codes: 0 success, 1 I/O or parse failure, 2 usage error, 3 no anomaly.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "kpiroot/datagen.hpp"
#include "kpiroot/error.hpp"
#include "kpiroot/evaluation.hpp"
#include "kpiroot/pipeline.hpp"
#include "kpiroot/report.hpp"
#include "kpiroot/series_io.hpp"

namespace fs = std::filesystem;
using namespace kpiroot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNoAnomaly = 3;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("kpiroot");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("KPIROOT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to "off"; only accept that when asked for.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

// Flags shared by localize and bench. Values land directly in a RunConfig;
// the strings are converted after parsing.
struct ConfigFlags {
  RunConfig cfg;
  std::string policy = "relative_threshold";
  std::string detection = "decomposition";
  std::string encoding = "isax";
  std::string scaling = "min_max";
  std::string config_file;

  void attach(CLI::App* app, bool with_config_file) {
    app->add_option("--w", cfg.w, "PAA size (0: round(sqrt(n)))");
    app->add_option("--alpha", cfg.alpha, "SAX alphabet size")->check(CLI::Range(2, 1000));
    app->add_option("--lambda", cfg.lambda, "similarity weight in the correlation score");
    app->add_option("--gamma", cfg.gamma, "trend-ratio threshold");
    app->add_option("--trend-lags", cfg.lag_l, "PAA points per trend-ratio window");
    app->add_option("--lag", cfg.q, "Granger lag order q");
    app->add_option("--period", cfg.period, "samples per seasonal cycle");
    app->add_option("--seasonal-window", cfg.seasonal_window, "STL seasonal smoother span");
    app->add_option("--trend-window", cfg.trend_window, "STL trend smoother span (0: heuristic)");
    app->add_option("--top-k", cfg.policy.k, "root causes selected by the top_k policy");
    app->add_option("--theta", cfg.policy.theta, "relative threshold of the default policy");
    app->add_option("--policy", policy, "selection policy")
        ->check(CLI::IsMember({"top_k", "relative_threshold"}));
    app->add_option("--jobs", cfg.jobs, "worker threads")->check(CLI::PositiveNumber);
    app->add_option("--seed", cfg.seed, "detector seed");
    app->add_option("--sigma-k", cfg.sigma_k, "robust-sigma multiplier on the residual");
    app->add_option("--window-length", cfg.window_length, "reconstruction window length");
    app->add_option("--epochs", cfg.epochs, "reconstruction training epochs");
    app->add_option("--detection", detection, "anomaly detection mode")
        ->check(CLI::IsMember({"decomposition", "trend_only"}));
    app->add_option("--encoding", encoding, "symbolic encoding")
        ->check(CLI::IsMember({"isax", "sax"}));
    app->add_option("--causality-scaling", scaling, "causality scaling")
        ->check(CLI::IsMember({"min_max", "raw"}));
    if (with_config_file) {
      app->add_option("--config", config_file,
                      "JSON run config, or a report whose embedded config is reused")
          ->check(CLI::ExistingFile);
    }
  }

  // A config file provides the base; flags given explicitly override it.
  RunConfig resolve(const CLI::App* app) const {
    RunConfig out = cfg;
    if (!config_file.empty()) {
      const auto j = read_json_file(config_file);
      RunConfig base = run_config_from_json(j.contains("config") ? j.at("config") : j);
      auto given = [&](const char* name) { return app->count(name) > 0; };
      if (given("--w")) base.w = cfg.w;
      if (given("--alpha")) base.alpha = cfg.alpha;
      if (given("--lambda")) base.lambda = cfg.lambda;
      if (given("--gamma")) base.gamma = cfg.gamma;
      if (given("--trend-lags")) base.lag_l = cfg.lag_l;
      if (given("--lag")) base.q = cfg.q;
      if (given("--period")) base.period = cfg.period;
      if (given("--seasonal-window")) base.seasonal_window = cfg.seasonal_window;
      if (given("--trend-window")) base.trend_window = cfg.trend_window;
      if (given("--top-k")) base.policy.k = cfg.policy.k;
      if (given("--theta")) base.policy.theta = cfg.policy.theta;
      if (given("--policy")) base.policy.mode = selection_mode_from_string(policy);
      if (given("--seed")) base.seed = cfg.seed;
      if (given("--sigma-k")) base.sigma_k = cfg.sigma_k;
      if (given("--window-length")) base.window_length = cfg.window_length;
      if (given("--epochs")) base.epochs = cfg.epochs;
      if (given("--detection")) base.detection = detection_mode_from_string(detection);
      if (given("--encoding")) base.encoding = encoding_from_string(encoding);
      if (given("--causality-scaling")) {
        base.causality_scaling = causality_scaling_from_string(scaling);
      }
      base.jobs = cfg.jobs;
      return base;
    }
    out.policy.mode = selection_mode_from_string(policy);
    out.detection = detection_mode_from_string(detection);
    out.encoding = encoding_from_string(encoding);
    out.causality_scaling = causality_scaling_from_string(scaling);
    return out;
  }
};

void emit_json(const std::string& out, const nlohmann::ordered_json& j) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(out, j);
  }
}

// ---- gen --------------------------------------------------------------

struct GenArgs {
  ScenarioSpec spec;
  std::optional<std::size_t> period;
  std::string spec_file;
  std::size_t count = 1;
  std::string out;
};

int run_gen(const GenArgs& a) {
  ScenarioSpec spec = a.spec;
  if (!a.spec_file.empty()) spec = scenario_spec_from_json(read_json_file(a.spec_file));
  if (a.period) spec.period = *a.period;
  spec.validate();

  if (a.count == 1) {
    write_dataset(generate_scenario(spec), a.out);
    spdlog::info("wrote {}", a.out);
    return kExitOk;
  }
  // Batches use consecutive seeds, one subdirectory per scenario.
  for (std::size_t i = 0; i < a.count; ++i) {
    ScenarioSpec s = spec;
    s.seed = spec.seed + i;
    const auto ds = generate_scenario(s);
    write_dataset(ds, fs::path(a.out) / ds.incident_id);
  }
  spdlog::info("wrote {} scenarios under {}", a.count, a.out);
  return kExitOk;
}

// ---- detect -----------------------------------------------------------

struct DetectArgs {
  std::string input;
  std::string out;
};

int run_detect(const DetectArgs& a, const RunConfig& cfg) {
  const auto series = read_kpi_csv(a.input);
  const auto detection = detect_alarm(series, cfg);
  const auto seg = detect_segments(detection, cfg);

  nlohmann::ordered_json j;
  j["series"] = series.id();
  j["n"] = series.size();
  j["w"] = seg.alarm_paa.size();
  j["config"] = to_json(cfg);
  j["trend_indices"] = detection.trend_idx;
  j["seasonal_indices"] = detection.seasonal_idx;
  j["residual_indices"] = detection.residual_idx;
  j["fused_indices"] = seg.sample_indices;
  j["paa_indices"] = seg.paa_indices;
  auto segments = nlohmann::ordered_json::array();
  for (const auto& s : seg.segments) {
    segments.push_back({{"start", s.start}, {"end", s.end}, {"kind", to_string(s.kind)}});
  }
  j["segments"] = std::move(segments);
  emit_json(a.out, j);
  return seg.sample_indices.empty() ? kExitNoAnomaly : kExitOk;
}

// ---- localize ---------------------------------------------------------

struct LocalizeArgs {
  std::string dataset;
  std::string out;
  bool reproducible = false;
};

int run_localize(const LocalizeArgs& a, RunConfig cfg) {
  const auto ds = load_dataset(a.dataset);
  if (cfg.period == 0 && ds.manifest.period != 0) {
    cfg.period = ds.manifest.period;
    spdlog::info("using the manifest period {}", cfg.period);
  }
  spdlog::info("{}: {} candidates, {} samples", ds.manifest.incident_id, ds.candidates.size(),
               ds.alarm.size());
  auto report = localize(ds.alarm, ds.candidates, cfg);
  report.incident_id = ds.manifest.incident_id;
  for (const auto& w : report.warnings) spdlog::warn("{}", w);
  emit_json(a.out, to_json(report, !a.reproducible));
  return report.anomaly_found() ? kExitOk : kExitNoAnomaly;
}

// ---- eval -------------------------------------------------------------

struct EvalArgs {
  std::vector<std::string> reports;
  std::vector<std::string> truths;
  std::vector<std::size_t> ks{1, 3, 5, 10};
  std::string out;
};

// A truth source is a dataset directory or a manifest file.
RcaGroundTruth load_truth(const fs::path& p) {
  const fs::path manifest = fs::is_directory(p) ? p / "manifest.json" : p;
  return read_manifest(manifest).truth;
}

int run_eval(const EvalArgs& a) {
  std::map<std::string, RcaGroundTruth> truths;
  for (const auto& t : a.truths) {
    auto truth = load_truth(t);
    const auto id = truth.incident_id;
    if (!truths.emplace(id, std::move(truth)).second) {
      throw ParseError("duplicate ground truth for incident '" + id + "'");
    }
  }

  std::vector<MetricReport> rows;
  auto incidents = nlohmann::ordered_json::array();
  for (const auto& r : a.reports) {
    const auto summary = report_summary_from_json(read_json_file(r));
    const auto it = truths.find(summary.incident_id);
    if (it == truths.end()) {
      throw ParseError("report " + r + " refers to incident '" + summary.incident_id +
                       "' with no matching manifest");
    }
    const std::set<std::string> predicted(summary.predicted.begin(), summary.predicted.end());
    rows.push_back(evaluate_incident(summary.ranked_ids, predicted, it->second, a.ks));
    nlohmann::ordered_json row;
    row["incident_id"] = summary.incident_id;
    row["metrics"] = to_json(rows.back());
    incidents.push_back(std::move(row));
  }

  nlohmann::ordered_json j;
  j["incidents"] = rows.size();
  j["aggregate"] = to_json(mean_report(rows));
  j["per_incident"] = std::move(incidents);
  emit_json(a.out, j);
  return kExitOk;
}

// ---- bench ------------------------------------------------------------

struct BenchArgs {
  std::vector<std::size_t> sizes{2880};
  std::vector<std::size_t> ms{50};
  std::size_t reps = 3;
  std::uint64_t seed = 1;
  std::string out;
};

int run_bench(const BenchArgs& a, RunConfig cfg) {
  std::ofstream file;
  if (!a.out.empty() && a.out != "-") {
    file.open(a.out);
    if (!file) throw ParseError("cannot write " + a.out);
  }
  std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
  os << "n,m,rep,stage,seconds\n";

  for (const auto n : a.sizes) {
    for (const auto m : a.ms) {
      ScenarioSpec spec;
      spec.n = n;
      spec.m = m;
      if (cfg.period != 0) spec.period = cfg.period;
      spec.seed = a.seed;
      const auto ds = generate_scenario(spec);
      RunConfig c = cfg;
      c.period = spec.period;
      for (std::size_t rep = 0; rep < a.reps; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto report = localize(ds.alarm, ds.candidates, c);
        const double total =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto& t : report.timings) {
          os << n << ',' << m << ',' << rep << ',' << t.stage << ',' << t.seconds << '\n';
        }
        os << n << ',' << m << ',' << rep << ",total," << total << '\n';
        spdlog::info("n={} m={} rep={} total {:.3f}s", n, m, rep, total);
      }
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"kpiroot: root-cause localization for KPI alarms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kpiroot 0.3.0");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a labeled synthetic incident");
  gen_cmd->add_option("--m", gen.spec.m, "candidate count");
  gen_cmd->add_option("--n", gen.spec.n, "samples per series");
  gen_cmd->add_option("--period", gen.period, "samples per seasonal cycle");
  gen_cmd->add_option("--root-causes", gen.spec.num_root_causes,
                      "root-cause count (0: uniform in [3, 8])");
  gen_cmd->add_option("--lag-delta", gen.spec.lag_delta, "root-cause lead in samples");
  gen_cmd->add_option("--noise", gen.spec.noise_sigma, "noise relative to cycle amplitude");
  gen_cmd->add_option("--seed", gen.spec.seed, "scenario seed");
  gen_cmd->add_option("--count", gen.count, "scenarios with consecutive seeds")
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--spec", gen.spec_file, "JSON scenario spec")->check(CLI::ExistingFile);
  gen_cmd->add_option("--out", gen.out, "output directory")->required();

  ConfigFlags detect_flags;
  DetectArgs detect;
  auto* detect_cmd = app.add_subcommand("detect", "flag anomalies on a single KPI series");
  detect_cmd->add_option("input", detect.input, "series CSV")->required()->check(CLI::ExistingFile);
  detect_cmd->add_option("--out", detect.out, "output JSON (default stdout)");
  detect_flags.attach(detect_cmd, false);

  ConfigFlags localize_flags;
  LocalizeArgs loc;
  auto* localize_cmd = app.add_subcommand("localize", "rank candidate KPIs for an alarm");
  localize_cmd->add_option("dataset", loc.dataset, "dataset directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  localize_cmd->add_option("--out", loc.out, "report JSON (default stdout)");
  localize_cmd->add_flag("--reproducible", loc.reproducible,
                         "omit wall-clock timings so reports compare byte for byte");
  localize_flags.attach(localize_cmd, true);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "score reports against ground truth");
  eval_cmd->add_option("--reports", ev.reports, "report JSON files")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--truth", ev.truths, "dataset directories or manifest files")
      ->required()
      ->check(CLI::ExistingPath);
  eval_cmd->add_option("--k", ev.ks, "cutoffs for Hit@k and NDCG@k");
  eval_cmd->add_option("--out", ev.out, "metrics JSON (default stdout)");

  ConfigFlags bench_flags;
  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "time localization across sizes");
  bench_cmd->add_option("--sizes", bench.sizes, "series lengths n");
  bench_cmd->add_option("--ms", bench.ms, "candidate counts m");
  bench_cmd->add_option("--reps", bench.reps, "repetitions per size")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--scenario-seed", bench.seed, "scenario seed");
  bench_cmd->add_option("--out", bench.out, "CSV output (default stdout)");
  bench_flags.attach(bench_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      if (!gen.period && gen.spec_file.empty()) {
        std::cerr << "gen: --period is required\n" << gen_cmd->help();
        return kExitUsage;
      }
      return run_gen(gen);
    }
    if (*detect_cmd) return run_detect(detect, detect_flags.resolve(detect_cmd));
    if (*localize_cmd) return run_localize(loc, localize_flags.resolve(localize_cmd));
    if (*eval_cmd) return run_eval(ev);
    if (*bench_cmd) return run_bench(bench, bench_flags.resolve(bench_cmd));
  } catch (const ParameterError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const ParseError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const InsufficientDataError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
