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

#ifndef AECLAB_HARNESS_REPORT_H_
#define AECLAB_HARNESS_REPORT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aeclab/key_values.h"

namespace aeclab {

// Metric names a report row may carry.
inline constexpr char kMetricErle[] = "erle_db";
inline constexpr char kMetricSiSdr[] = "si_sdr_db";
inline constexpr char kMetricWithin10[] = "delay_within_10";
inline constexpr char kMetricTop1[] = "delay_top1";
inline constexpr char kMetricErrorHist[] = "delay_abs_err_hist";
// Column label used for SI-SDR in wide tables; it stands in for a
// perceptual quality score that is not computed here.
inline constexpr char kSiSdrColumn[] = "si_sdr_db (non-paper proxy for PESQ)";

struct ReportRow {
  std::string train_set;
  std::string test_set;
  std::string method;
  std::string metric;
  std::string bucket;  // histogram bucket or "all"
  std::string ser_db;  // test SER or "mean"
  double value = 0.0;
  int count = 0;  // records behind the value
};

struct ExperimentReport {
  std::string experiment;
  uint64_t seed = 0;
  KeyValues config;
  std::vector<std::string> notes;
  std::vector<ReportRow> rows;
};

// Throws Error on unknown metrics, empty cells or non-finite values.
void ValidateReport(const ExperimentReport& report);

// Long format, one row per line.
std::string ReportCsv(const ExperimentReport& report);
std::string ReportJson(const ExperimentReport& report);
// Wide format for enhancement results: one line per (train, test, method)
// with ERLE and SI-SDR columns over the "mean" SER rows. Empty when the
// report has no such rows.
std::string ReportTableCsv(const ExperimentReport& report);

// Writes <dir>/<experiment>.csv, .json and, when nonempty, _table.csv.
// Returns the written paths.
std::vector<std::string> WriteReport(const ExperimentReport& report, const std::string& dir);

}  // namespace aeclab

#endif  // AECLAB_HARNESS_REPORT_H_
