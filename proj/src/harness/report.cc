// Copyright 2026 The aeclab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aeclab/harness/report.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <tuple>

#include <json.hpp>

#include "aeclab/error.h"

namespace aeclab {
namespace {

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Quotes a CSV field when it holds a separator or quote.
std::string Field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string MetricLabel(const std::string& metric) {
  return metric == kMetricSiSdr ? kSiSdrColumn : metric;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
  if (!f) throw Error("write failed: " + path);
}

}  // namespace

void ValidateReport(const ExperimentReport& r) {
  for (const auto& row : r.rows) {
    const std::string& m = row.metric;
    if (m != kMetricErle && m != kMetricSiSdr && m != kMetricWithin10 && m != kMetricTop1 &&
        m != kMetricErrorHist) {
      throw Error("report row has unknown metric '" + m + "'");
    }
    if (row.count <= 0) {
      throw Error("report row " + row.method + "/" + m + " has no records behind it");
    }
    if (!std::isfinite(row.value)) {
      throw Error("report row " + row.method + "/" + m + " is not finite");
    }
  }
}

std::string ReportCsv(const ExperimentReport& r) {
  ValidateReport(r);
  std::string out = "train_set,test_set,method,metric,metric_label,bucket,ser_db,value,count\n";
  for (const auto& row : r.rows) {
    out += Field(row.train_set) + "," + Field(row.test_set) + "," + Field(row.method) + "," +
           row.metric + "," + Field(MetricLabel(row.metric)) + "," + Field(row.bucket) + "," + Field(row.ser_db) + "," +
           Fmt(row.value) + "," + std::to_string(row.count) + "\n";
  }
  return out;
}

std::string ReportJson(const ExperimentReport& r) {
  ValidateReport(r);
  nlohmann::ordered_json j;
  j["experiment"] = r.experiment;
  j["seed"] = r.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.config) config[k] = v;
  j["config"] = config;
  j["notes"] = r.notes;
  j["column_labels"] = {{kMetricSiSdr, kSiSdrColumn}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"train_set", row.train_set},
                    {"test_set", row.test_set},
                    {"method", row.method},
                    {"metric", row.metric},
                    {"metric_label", MetricLabel(row.metric)},
                    {"bucket", row.bucket},
                    {"ser_db", row.ser_db},
                    {"value", std::stod(Fmt(row.value))},
                    {"count", row.count}});
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

std::string ReportTableCsv(const ExperimentReport& r) {
  ValidateReport(r);
  using Key = std::tuple<std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::map<std::string, double>> cells;
  for (const auto& row : r.rows) {
    if (row.ser_db != "mean" || (row.metric != kMetricErle && row.metric != kMetricSiSdr)) {
      continue;
    }
    const Key key{row.train_set, row.test_set, row.method};
    if (!cells.count(key)) order.push_back(key);
    cells[key][row.metric] = row.value;
  }
  if (order.empty()) return "";
  std::string out = std::string("train_set,test_set,method,erle_db,") + Field(kSiSdrColumn) + "\n";
  for (const auto& key : order) {
    const auto& c = cells[key];
    auto cell = [&](const char* m) { return c.count(m) ? Fmt(c.at(m)) : std::string(); };
    out += Field(std::get<0>(key)) + "," + Field(std::get<1>(key)) + "," +
           Field(std::get<2>(key)) + "," + cell(kMetricErle) + "," + cell(kMetricSiSdr) + "\n";
  }
  return out;
}

std::vector<std::string> WriteReport(const ExperimentReport& r, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string base = (std::filesystem::path(dir) / r.experiment).string();
  std::vector<std::string> paths = {base + ".csv", base + ".json"};
  WriteText(paths[0], ReportCsv(r));
  WriteText(paths[1], ReportJson(r));
  const std::string table = ReportTableCsv(r);
  if (!table.empty()) {
    paths.push_back(base + "_table.csv");
    WriteText(paths.back(), table);
  }
  return paths;
}

}  // namespace aeclab
