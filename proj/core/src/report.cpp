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

#include "kpiroot/report.hpp"

#include <fstream>

#include "kpiroot/error.hpp"

namespace kpiroot {

nlohmann::ordered_json to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["w"] = cfg.w;
  j["alpha"] = cfg.alpha;
  j["lambda"] = cfg.lambda;
  j["gamma"] = cfg.gamma;
  j["trend_lags"] = cfg.lag_l;
  j["lag"] = cfg.q;
  j["period"] = cfg.period;
  j["seasonal_window"] = cfg.seasonal_window;
  j["trend_window"] = cfg.trend_window;
  j["policy"] = {{"mode", to_string(cfg.policy.mode)},
                 {"k", cfg.policy.k},
                 {"theta", cfg.policy.theta}};
  j["seed"] = cfg.seed;
  j["sigma_k"] = cfg.sigma_k;
  j["window_length"] = cfg.window_length;
  j["epochs"] = cfg.epochs;
  j["learning_rate"] = cfg.learning_rate;
  j["train_stride"] = cfg.train_stride;
  j["ae_threshold_rule"] = to_string(cfg.ae_threshold_rule);
  j["ae_threshold_k"] = cfg.ae_threshold_k;
  j["max_gap"] = cfg.max_gap;
  j["detection"] = to_string(cfg.detection);
  j["trend_ratio_in_fusion"] = cfg.trend_ratio_in_fusion;
  j["encoding"] = to_string(cfg.encoding);
  j["causality_scaling"] = to_string(cfg.causality_scaling);
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    c.w = j.value("w", c.w);
    c.alpha = j.value("alpha", c.alpha);
    c.lambda = j.value("lambda", c.lambda);
    c.gamma = j.value("gamma", c.gamma);
    c.lag_l = j.value("trend_lags", c.lag_l);
    c.q = j.value("lag", c.q);
    c.period = j.value("period", c.period);
    c.seasonal_window = j.value("seasonal_window", c.seasonal_window);
    c.trend_window = j.value("trend_window", c.trend_window);
    if (j.contains("policy")) {
      const auto& p = j.at("policy");
      c.policy.mode = selection_mode_from_string(p.value("mode", std::string("relative_threshold")));
      c.policy.k = p.value("k", c.policy.k);
      c.policy.theta = p.value("theta", c.policy.theta);
    }
    c.seed = j.value("seed", c.seed);
    c.sigma_k = j.value("sigma_k", c.sigma_k);
    c.window_length = j.value("window_length", c.window_length);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.train_stride = j.value("train_stride", c.train_stride);
    if (j.contains("ae_threshold_rule")) {
      c.ae_threshold_rule =
          threshold_rule_from_string(j.at("ae_threshold_rule").get<std::string>());
    }
    c.ae_threshold_k = j.value("ae_threshold_k", c.ae_threshold_k);
    c.max_gap = j.value("max_gap", c.max_gap);
    c.detection = detection_mode_from_string(j.value("detection", std::string("decomposition")));
    c.trend_ratio_in_fusion = j.value("trend_ratio_in_fusion", c.trend_ratio_in_fusion);
    c.encoding = encoding_from_string(j.value("encoding", std::string("isax")));
    c.causality_scaling =
        causality_scaling_from_string(j.value("causality_scaling", std::string("min_max")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid run config: ") + e.what());
  }
  return c;
}

nlohmann::ordered_json to_json(const LocalizationReport& report, bool include_execution) {
  nlohmann::ordered_json j;
  j["schema_version"] = LocalizationReport::kSchemaVersion;
  j["incident_id"] = report.incident_id;
  j["config"] = to_json(report.config);
  j["n"] = report.n;
  j["w"] = report.w;
  j["m"] = report.m;
  j["anomaly_found"] = report.anomaly_found();
  j["anomaly_indices"] = report.anomaly_indices;
  auto segments = nlohmann::ordered_json::array();
  for (const auto& s : report.segments) {
    segments.push_back({{"start", s.start}, {"end", s.end}, {"kind", to_string(s.kind)}});
  }
  j["segments"] = std::move(segments);
  auto ranking = nlohmann::ordered_json::array();
  for (const auto& s : report.ranking) {
    ranking.push_back({{"rank", s.rank},
                       {"kpi_id", s.kpi_id},
                       {"similarity", s.similarity},
                       {"causality_raw", s.causality_raw},
                       {"causality_scaled", s.causality_scaled},
                       {"combined", s.combined}});
  }
  j["ranking"] = std::move(ranking);
  j["predicted"] = report.predicted;
  j["warnings"] = report.warnings;
  if (include_execution) {
    nlohmann::ordered_json timings;
    for (const auto& t : report.timings) timings[t.stage] = t.seconds;
    j["execution"] = {{"jobs", report.config.jobs}, {"timings_seconds", std::move(timings)}};
  }
  return j;
}

ReportSummary report_summary_from_json(const nlohmann::json& j) {
  ReportSummary s;
  try {
    s.incident_id = j.at("incident_id").get<std::string>();
    for (const auto& r : j.at("ranking")) s.ranked_ids.push_back(r.at("kpi_id").get<std::string>());
    s.predicted = j.at("predicted").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid report: ") + e.what());
  }
  return s;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file", 0, path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0, path.string());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file", 0, path.string());
  out << j.dump(2) << '\n';
}

}  // namespace kpiroot
