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

#include "vrise/results.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vrise::experiments {

namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  if (text == "nan" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(text, &used);
  if (used != text.size()) throw std::invalid_argument("bad number '" + text + "'");
  return v;
}

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw std::runtime_error("csv: unterminated quoted field");
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

bool same_value(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

}  // namespace

std::string PrecisionTuple::to_string() const {
  return "gen=" + vrise::to_string(generation) +
         ",store=" + vrise::to_string(storage) +
         ",game=" + vrise::to_string(game);
}

PrecisionTuple PrecisionTuple::parse(const std::string& text) {
  PrecisionTuple t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("precision: expected stage=mode, got '" + item + "'");
    }
    const std::string stage = item.substr(0, eq);
    const Precision p = parse_precision(item.substr(eq + 1));
    if (stage == "gen" || stage == "generation") {
      t.generation = p;
    } else if (stage == "store" || stage == "storage") {
      t.storage = p;
    } else if (stage == "game") {
      t.game = p;
    } else {
      throw std::invalid_argument("precision: unknown stage '" + stage + "'");
    }
  }
  return t;
}

std::vector<PrecisionTuple> PrecisionTuple::all() {
  std::vector<PrecisionTuple> out;
  for (int bits = 0; bits < 8; ++bits) {
    out.push_back({(bits & 4) ? Precision::kFp16 : Precision::kFp32,
                   (bits & 2) ? Precision::kFp16 : Precision::kFp32,
                   (bits & 1) ? Precision::kFp16 : Precision::kFp32});
  }
  return out;
}

std::string ResultRow::key() const {
  return digest + "|" + image_id + "|" + std::to_string(run) + "|" + metric +
         "|" + precision.to_string() + "|" + std::to_string(n_masks);
}

nlohmann::json ResultRow::to_json() const {
  nlohmann::json j;
  j["digest"] = digest;
  j["image"] = image_id;
  j["run"] = run;
  j["metric"] = metric;
  if (std::isfinite(value)) {
    j["value"] = value;
  } else {
    j["value"] = format_double(value);
  }
  j["precision"] = precision.to_string();
  j["algorithm"] = algorithm;
  j["n_masks"] = n_masks;
  j["p1"] = p1;
  j["polygons"] = polygons;
  j["meshcount"] = meshcount;
  j["sigma"] = sigma;
  j["error"] = error;
  return j;
}

ResultRow ResultRow::from_json(const nlohmann::json& j) {
  ResultRow r;
  r.digest = j.at("digest").get<std::string>();
  r.image_id = j.at("image").get<std::string>();
  r.run = j.at("run").get<int>();
  r.metric = j.at("metric").get<std::string>();
  const auto& v = j.at("value");
  r.value = v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>();
  r.precision = PrecisionTuple::parse(j.at("precision").get<std::string>());
  r.algorithm = j.value("algorithm", "");
  r.n_masks = j.value("n_masks", std::size_t{0});
  r.p1 = j.value("p1", 0.0);
  r.polygons = j.value("polygons", std::size_t{0});
  r.meshcount = j.value("meshcount", std::size_t{0});
  r.sigma = j.value("sigma", 0.0);
  r.error = j.value("error", "");
  return r;
}

bool operator==(const ResultRow& a, const ResultRow& b) {
  return a.digest == b.digest && a.image_id == b.image_id && a.run == b.run &&
         a.metric == b.metric && same_value(a.value, b.value) &&
         a.precision == b.precision && a.algorithm == b.algorithm &&
         a.n_masks == b.n_masks && same_value(a.p1, b.p1) &&
         a.polygons == b.polygons && a.meshcount == b.meshcount &&
         same_value(a.sigma, b.sigma) && a.error == b.error;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns{
      "digest", "image", "run",      "metric",    "value", "precision", "algorithm",
      "n_masks", "p1",   "polygons", "meshcount", "sigma", "error"};
  return columns;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& r : rows) {
    out << quote(r.digest) << ',' << quote(r.image_id) << ',' << r.run << ','
        << quote(r.metric) << ',' << format_double(r.value) << ','
        << quote(r.precision.to_string()) << ',' << quote(r.algorithm) << ','
        << r.n_masks << ',' << format_double(r.p1) << ',' << r.polygons << ','
        << r.meshcount << ',' << format_double(r.sigma) << ','
        << quote(r.error) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const auto records = parse_csv(buffer.str());
  if (records.empty() || records.front() != csv_columns()) {
    throw std::runtime_error(path.string() + ": unexpected csv header");
  }
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != csv_columns().size()) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(i) +
                               " has " + std::to_string(f.size()) + " fields");
    }
    ResultRow r;
    r.digest = f[0];
    r.image_id = f[1];
    r.run = std::stoi(f[2]);
    r.metric = f[3];
    r.value = parse_double(f[4]);
    r.precision = PrecisionTuple::parse(f[5]);
    r.algorithm = f[6];
    r.n_masks = std::stoull(f[7]);
    r.p1 = parse_double(f[8]);
    r.polygons = std::stoull(f[9]);
    r.meshcount = std::stoull(f[10]);
    r.sigma = parse_double(f[11]);
    r.error = f[12];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path,
                 const std::vector<ResultRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : rows) out << r.to_json().dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<ResultRow> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<ResultRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(ResultRow::from_json(nlohmann::json::parse(line)));
  }
  return rows;
}

Journal::Journal(const std::filesystem::path& path) : path_(path) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        ResultRow row = ResultRow::from_json(nlohmann::json::parse(line));
        if (keys_.insert(row.key()).second) rows_.push_back(std::move(row));
      } catch (const std::exception&) {
        // torn trailing write
      }
    }
    in.close();
    // Terminate a torn last line.
    std::ifstream check(path, std::ios::binary | std::ios::ate);
    const auto size = static_cast<std::streamoff>(check.tellg());
    if (size > 0) {
      check.seekg(size - 1);
      char last = 0;
      check.get(last);
      check.close();
      if (last != '\n') {
        std::ofstream fix(path, std::ios::binary | std::ios::app);
        fix << '\n';
      }
    }
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw std::runtime_error("cannot open journal " + path.string());
}

bool Journal::contains(const std::string& key) const {
  std::lock_guard lock(mutex_);
  return keys_.count(key) != 0;
}

bool Journal::append(const ResultRow& row) {
  std::lock_guard lock(mutex_);
  if (!keys_.insert(row.key()).second) return false;
  rows_.push_back(row);
  if (out_.is_open()) {
    out_ << row.to_json().dump() << '\n';
    out_.flush();
    if (!out_) throw std::runtime_error("journal write failed: " + path_.string());
  }
  return true;
}

std::vector<ResultRow> Journal::rows() const {
  std::lock_guard lock(mutex_);
  return rows_;
}

std::size_t Journal::size() const {
  std::lock_guard lock(mutex_);
  return rows_.size();
}

}  // namespace vrise::experiments
