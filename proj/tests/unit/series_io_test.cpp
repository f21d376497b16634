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

#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "kpiroot/error.hpp"
#include "kpiroot/series_io.hpp"

namespace kpiroot {
namespace {

TEST(KpiCsv, ReadsWellFormedFile) {
  std::istringstream in("timestamp,value\n100,1.5\n160,2\n220,-3.25\n");
  const auto s = read_kpi_csv(in, "cpu");
  EXPECT_EQ(s.id(), "cpu");
  EXPECT_EQ(s.start_time(), 100);
  EXPECT_EQ(s.interval(), 60);
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s.values()[2], -3.25);
}

TEST(KpiCsv, RoundTripsExactly) {
  const KpiSeries s("mem", {0.1, 1.0 / 3.0, -2e-17, 12345.678901234567}, 1700000000, 30);
  std::stringstream buf;
  write_kpi_csv(buf, s);
  const auto back = read_kpi_csv(buf, "mem");
  EXPECT_EQ(back.start_time(), s.start_time());
  EXPECT_EQ(back.interval(), s.interval());
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(back.values()[i], s.values()[i]);
}

void expect_parse_error(const std::string& text, std::size_t line) {
  std::istringstream in(text);
  try {
    read_kpi_csv(in, "x");
    FAIL() << "expected a parse error for:\n" << text;
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
  }
}

TEST(KpiCsv, ReportsLineNumbers) {
  expect_parse_error("", 1);
  expect_parse_error("time,val\n0,1\n", 1);
  expect_parse_error("timestamp,value\n0,1\n60,abc\n", 3);
  expect_parse_error("timestamp,value\n0,1\n60\n", 3);
  expect_parse_error("timestamp,value\n0,1\n60,2\n60,3\n", 4);
  expect_parse_error("timestamp,value\n0,1\n60,2\n150,3\n", 4);
  expect_parse_error("timestamp,value\n0,1\n60,nan\n", 3);
  expect_parse_error("timestamp,value\nx,1\n", 2);
}

TEST(KpiCsv, RejectsSingleSample) {
  std::istringstream in("timestamp,value\n0,1\n");
  EXPECT_THROW(read_kpi_csv(in, "x"), ParseError);
}

TEST(KpiCsv, MissingFileIsParseError) {
  EXPECT_THROW(read_kpi_csv(std::filesystem::path("/nonexistent/kpi.csv")), ParseError);
}

TEST(ParseError, FormatsLocation) {
  EXPECT_STREQ(ParseError("bad", 3, "a.csv").what(), "a.csv:3: bad");
  EXPECT_STREQ(ParseError("bad", 3).what(), "line 3: bad");
  EXPECT_STREQ(ParseError("bad").what(), "bad");
}

}  // namespace
}  // namespace kpiroot
