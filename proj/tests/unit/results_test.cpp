/*
 * Copyright 2026 The vrise Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "vrise/results.hpp"

namespace vrise::experiments {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "vrise_results_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  fs::remove(p);
  return p;
}

ResultRow sample_row(int run, const std::string& metric, double value) {
  ResultRow r;
  r.digest = "0123456789abcdef";
  r.image_id = "img-1";
  r.run = run;
  r.metric = metric;
  r.value = value;
  r.algorithm = "vrise";
  r.n_masks = 500;
  r.p1 = 0.5;
  r.polygons = 49;
  r.meshcount = 10;
  r.sigma = 3.0;
  return r;
}

std::vector<ResultRow> tricky_rows() {
  std::vector<ResultRow> rows;
  rows.push_back(sample_row(0, "pointing", 1.0));
  rows.push_back(sample_row(1, "remove", 0.1 + 0.2));
  ResultRow quoted = sample_row(2, "insert", 1.0 / 3.0);
  quoted.image_id = "a \"quoted\", comma,\nnewline";
  rows.push_back(quoted);
  ResultRow failed = sample_row(kAggregateRun, "consistency",
                                std::numeric_limits<double>::quiet_NaN());
  failed.error = "scorer failed: timeout";
  failed.precision = PrecisionTuple::parse("gen=fp16,store=fp16,game=fp32");
  rows.push_back(failed);
  ResultRow inf = sample_row(3, "blur", std::numeric_limits<double>::infinity());
  rows.push_back(inf);
  return rows;
}

TEST(PrecisionTupleTest, ParseAndPrint) {
  const PrecisionTuple p = PrecisionTuple::parse("gen=fp16,store=fp32,game=fp16");
  EXPECT_EQ(p.generation, Precision::kFp16);
  EXPECT_EQ(p.storage, Precision::kFp32);
  EXPECT_EQ(p.game, Precision::kFp16);
  EXPECT_EQ(p.to_string(), "gen=fp16,store=fp32,game=fp16");
  EXPECT_EQ(PrecisionTuple::parse("generation=fp16,storage=fp16"),
            (PrecisionTuple{Precision::kFp16, Precision::kFp16, Precision::kFp32}));
  EXPECT_EQ(PrecisionTuple{}.to_string(), "gen=fp32,store=fp32,game=fp32");
  EXPECT_THROW(PrecisionTuple::parse("gen=fp64"), std::invalid_argument);
  EXPECT_THROW(PrecisionTuple::parse("colour=fp16"), std::invalid_argument);
}

TEST(PrecisionTupleTest, AllCombinations) {
  const auto all = PrecisionTuple::all();
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all.front(), PrecisionTuple{});
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) EXPECT_FALSE(all[i] == all[j]);
  }
}

TEST(ResultRowTest, KeyDistinguishesCheckpointsAndPrecision) {
  ResultRow a = sample_row(0, "remove", 0.5);
  ResultRow b = a;
  b.n_masks = 1000;
  EXPECT_NE(a.key(), b.key());
  ResultRow c = a;
  c.precision.game = Precision::kFp16;
  EXPECT_NE(a.key(), c.key());
  ResultRow d = a;
  d.value = 0.7;
  EXPECT_EQ(a.key(), d.key());
}

TEST(ResultRowTest, JsonRoundTrip) {
  for (const ResultRow& row : tricky_rows()) {
    EXPECT_EQ(ResultRow::from_json(row.to_json()), row);
  }
}

TEST(ResultsIoTest, CsvRoundTrip) {
  const auto rows = tricky_rows();
  const fs::path p = temp_path("rows.csv");
  write_csv(p, rows);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("digest,image,run,metric,value", 0), 0u);
  EXPECT_EQ(read_csv(p), rows);
}

TEST(ResultsIoTest, JsonlRoundTrip) {
  const auto rows = tricky_rows();
  const fs::path p = temp_path("rows.jsonl");
  write_jsonl(p, rows);
  EXPECT_EQ(read_jsonl(p), rows);
}

TEST(JournalTest, DeduplicatesAndResumes) {
  const fs::path p = temp_path("journal.jsonl");
  {
    Journal j(p);
    EXPECT_TRUE(j.append(sample_row(0, "remove", 0.25)));
    EXPECT_FALSE(j.append(sample_row(0, "remove", 0.75)));
    EXPECT_TRUE(j.append(sample_row(1, "remove", 0.5)));
    EXPECT_EQ(j.size(), 2u);
  }
  Journal again(p);
  EXPECT_EQ(again.size(), 2u);
  EXPECT_TRUE(again.contains(sample_row(0, "remove", 0.0).key()));
  EXPECT_EQ(again.rows()[0].value, 0.25);
  EXPECT_FALSE(again.append(sample_row(1, "remove", 0.9)));
  EXPECT_TRUE(again.append(sample_row(2, "remove", 0.9)));
  EXPECT_EQ(read_jsonl(p).size(), 3u);
}

TEST(JournalTest, SkipsTornLastLine) {
  const fs::path p = temp_path("torn.jsonl");
  {
    Journal j(p);
    j.append(sample_row(0, "insert", 0.5));
  }
  {
    std::ofstream out(p, std::ios::app);
    out << R"({"digest":"0123456789abcdef","image":"img-1","ru)";
  }
  Journal j(p);
  EXPECT_EQ(j.size(), 1u);
  EXPECT_TRUE(j.append(sample_row(1, "insert", 0.6)));
  Journal reread(p);
  EXPECT_EQ(reread.size(), 2u);
}

TEST(JournalTest, InMemory) {
  Journal j;
  EXPECT_TRUE(j.append(sample_row(0, "pointing", 1.0)));
  EXPECT_FALSE(j.append(sample_row(0, "pointing", 0.0)));
  EXPECT_EQ(j.size(), 1u);
}

}  // namespace
}  // namespace vrise::experiments
