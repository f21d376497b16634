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

#include "kpiroot/series_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "kpiroot/error.hpp"

namespace kpiroot {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::int64_t parse_timestamp(std::string_view field, std::size_t line) {
  std::int64_t value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("invalid timestamp '" + std::string(field) + "'", line);
  }
  return value;
}

double parse_value(std::string_view field, std::size_t line) {
  // strtod rather than from_chars<double>: the latter is missing in older
  // standard libraries still common on CI images.
  std::string copy(field);
  char* end = nullptr;
  const double v = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw ParseError("invalid value '" + copy + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + copy + "'", line);
  return v;
}

}  // namespace

KpiSeries read_kpi_csv(std::istream& in, std::string id) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty file, expected header", 1);
  ++line_no;
  if (trim(line) != "timestamp,value") {
    throw ParseError("expected header 'timestamp,value'", line_no);
  }

  std::vector<double> values;
  std::int64_t first = 0;
  std::int64_t prev = 0;
  std::int64_t stride = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected two comma-separated fields", line_no);
    }
    const std::int64_t ts = parse_timestamp(trim(row.substr(0, comma)), line_no);
    const double v = parse_value(trim(row.substr(comma + 1)), line_no);
    if (values.empty()) {
      first = ts;
    } else {
      if (ts <= prev) throw ParseError("timestamps must be strictly increasing", line_no);
      if (values.size() == 1) {
        stride = ts - prev;
      } else if (ts - prev != stride) {
        throw ParseError("irregular sampling stride", line_no);
      }
    }
    prev = ts;
    values.push_back(v);
  }
  if (values.size() < 2) throw ParseError("at least two samples required", line_no);
  return KpiSeries(std::move(id), std::move(values), first, stride);
}

KpiSeries read_kpi_csv(const std::filesystem::path& path, std::string id) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return read_kpi_csv(in, std::move(id));
  } catch (const ParseError& e) {
    throw ParseError(e.message(), e.line(), path.string());
  }
}

KpiSeries read_kpi_csv(const std::filesystem::path& path) {
  return read_kpi_csv(path, path.stem().string());
}

void write_kpi_csv(std::ostream& out, const KpiSeries& series) {
  out << "timestamp,value\n";
  char buf[64];
  const auto values = series.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    // %.17g round-trips every double.
    std::snprintf(buf, sizeof(buf), "%.17g", values[i]);
    out << series.timestamp(i) << ',' << buf << '\n';
  }
}

void write_kpi_csv(const std::filesystem::path& path, const KpiSeries& series) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  write_kpi_csv(out, series);
}

}  // namespace kpiroot
