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

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kpiroot/pipeline.hpp"

namespace kpiroot {

nlohmann::ordered_json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Stable field order. The "execution" block (jobs, per-stage wall-clock
/// timings) is the only non-reproducible part and can be left out.
nlohmann::ordered_json to_json(const LocalizationReport& report, bool include_execution = true);

/// What evaluation needs back from a serialized report.
struct ReportSummary {
  std::string incident_id;
  std::vector<std::string> ranked_ids;
  std::vector<std::string> predicted;
};

ReportSummary report_summary_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace kpiroot
