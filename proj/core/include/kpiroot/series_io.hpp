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
#include <iosfwd>
#include <string>

#include "kpiroot/series.hpp"

namespace kpiroot {

// Per-series CSV: header `timestamp,value`, integer epoch seconds, strictly
// increasing timestamps at a constant stride.

/// Throws ParseError (with a 1-based line number) on malformed content.
KpiSeries read_kpi_csv(std::istream& in, std::string id);
KpiSeries read_kpi_csv(const std::filesystem::path& path);
KpiSeries read_kpi_csv(const std::filesystem::path& path, std::string id);

void write_kpi_csv(std::ostream& out, const KpiSeries& series);
void write_kpi_csv(const std::filesystem::path& path, const KpiSeries& series);

}  // namespace kpiroot
