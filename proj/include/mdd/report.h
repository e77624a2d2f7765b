// mdd/report.h

// Copyright 2026  mfc-mdd authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef MDD_REPORT_H_
#define MDD_REPORT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdd {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), drawn in x order
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  int width = 640;
  int height = 400;
};

/// Static SVG line chart with one polyline and legend entry per series.
/// Throws ContractError when no series has a point.
std::string RenderLineChart(const ChartSpec& spec, const std::vector<Series>& series);

/// One row of a sweep result table.
struct SweepRow {
  std::string kind;  // "baseline" (cross-entropy continuation) or "mfc"
  int m_best = 0;    // 0 for baseline rows
  double beta = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> per, f1, dar, mean_utterance_f1;
  std::string status = "ok";  // "ok" or "failed: <reason>"
};

/// Columns: kind,M,beta,seed,per,f1,dar,utt_f1,status.
void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> ReadSweepCsv(const std::string& path);

/// Means over seeds of successful rows, per (kind, M, beta).
std::vector<SweepRow> AverageOverSeeds(const std::vector<SweepRow>& rows);

/// Writes sweep_summary.csv plus f1_vs_beta.svg, per_vs_beta.svg and
/// f1_vs_m.svg into out_dir. Baseline rows are drawn as flat reference lines.
void WriteSweepReport(const std::vector<SweepRow>& rows, const std::string& out_dir);

}  // namespace mdd

#endif  // MDD_REPORT_H_
