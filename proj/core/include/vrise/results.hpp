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

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "vrise/classifier.hpp"

namespace vrise::experiments {

// Precision of the three pipeline stages.
struct PrecisionTuple {
  Precision generation = Precision::kFp32;
  Precision storage = Precision::kFp32;
  Precision game = Precision::kFp32;

  // "gen=fp32,store=fp32,game=fp32"
  std::string to_string() const;
  // Accepts any subset of gen=, store=, game= in any order; missing stages
  // stay fp32.
  static PrecisionTuple parse(const std::string& text);
  // All 8 combinations, all-fp32 first.
  static std::vector<PrecisionTuple> all();

  friend bool operator==(const PrecisionTuple&, const PrecisionTuple&) = default;
};

inline constexpr int kAggregateRun = -1;

struct ResultRow {
  std::string digest;
  std::string image_id;
  int run = 0;  // kAggregateRun for rows over all runs
  std::string metric;
  double value = 0.0;
  PrecisionTuple precision;
  std::string algorithm;
  std::size_t n_masks = 0;  // masks behind the value (checkpoint)
  double p1 = 0.0;
  std::size_t polygons = 0;
  std::size_t meshcount = 0;
  double sigma = 0.0;
  std::string error;  // non-empty for failed rows; value is NaN

  // Unique row key: digest, image, run, metric, precision and mask count.
  std::string key() const;
  bool failed() const { return !error.empty(); }

  nlohmann::json to_json() const;
  static ResultRow from_json(const nlohmann::json& j);

  friend bool operator==(const ResultRow&, const ResultRow&);
};

const std::vector<std::string>& csv_columns();

void write_csv(const std::filesystem::path& path,
               const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_jsonl(const std::filesystem::path& path);

// Append-only JSON-lines log of completed rows. Reopening an existing
// journal restores its rows; appending a key already present is a no-op.
// A torn last line is ignored. Thread-safe.
class Journal {
 public:
  Journal() = default;  // in-memory only
  explicit Journal(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  // Returns false when the key was already present.
  bool append(const ResultRow& row);
  std::vector<ResultRow> rows() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::filesystem::path path_;
  std::ofstream out_;
  std::set<std::string> keys_;
  std::vector<ResultRow> rows_;
};

}  // namespace vrise::experiments
