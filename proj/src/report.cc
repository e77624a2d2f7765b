// src/report.cc

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

#include "mdd/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <tuple>

#include "mdd/error.h"
#include "mdd/text_io.h"

namespace mdd {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::optional<double> ParseMetricCell(const std::string& s, const std::string& where) {
  if (s == "undef" || s.empty()) return std::nullopt;
  return ParseDouble(s, where);
}

std::string StatusCell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

}  // namespace

std::string RenderLineChart(const ChartSpec& spec, const std::vector<Series>& series) {
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const Series& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!std::isfinite(x0)) throw ContractError("chart '" + spec.title + "' has no data points");
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.05, y1 += 0.05;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 64, right = 150, top = 36, bottom = 52;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    std::to_string(spec.width) + "\" height=\"" + std::to_string(spec.height) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Num(left + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" +
         Escape(spec.title) + "</text>\n";
  svg += "<rect x=\"" + Num(left) + "\" y=\"" + Num(top) + "\" width=\"" + Num(pw) +
         "\" height=\"" + Num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
    svg += "<text x=\"" + Num(px(xv)) + "\" y=\"" + Num(top + ph + 16) +
           "\" text-anchor=\"middle\">" + Tick(xv) + "</text>\n";
    svg += "<text x=\"" + Num(left - 6) + "\" y=\"" + Num(py(yv) + 4) +
           "\" text-anchor=\"end\">" + Tick(yv) + "</text>\n";
    svg += "<line x1=\"" + Num(left) + "\" x2=\"" + Num(left + pw) + "\" y1=\"" + Num(py(yv)) +
           "\" y2=\"" + Num(py(yv)) + "\" stroke=\"#dddddd\"/>\n";
  }
  svg += "<text x=\"" + Num(left + pw / 2) + "\" y=\"" + Num(spec.height - 12.0) +
         "\" text-anchor=\"middle\">" + Escape(spec.x_label) + "</text>\n";
  svg += "<text transform=\"translate(16," + Num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + Escape(spec.y_label) + "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts = series[k].points;
    std::sort(pts.begin(), pts.end());
    std::string path;
    for (const auto& [x, y] : pts) path += Num(px(x)) + "," + Num(py(y)) + " ";
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\" points=\"" + path + "\"/>\n";
    for (const auto& [x, y] : pts)
      svg += "<circle cx=\"" + Num(px(x)) + "\" cy=\"" + Num(py(y)) + "\" r=\"3\" fill=\"" +
             color + "\"/>\n";
    const double ly = top + 12 + 18.0 * static_cast<double>(k);
    svg += "<line x1=\"" + Num(left + pw + 12) + "\" x2=\"" + Num(left + pw + 32) + "\" y1=\"" +
           Num(ly) + "\" y2=\"" + Num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + Num(left + pw + 38) + "\" y=\"" + Num(ly + 4) + "\">" +
           Escape(series[k].label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void WriteSweepCsv(const std::string& path, const std::vector<SweepRow>& rows) {
  CsvWriter w(path, {"kind", "M", "beta", "seed", "per", "f1", "dar", "utt_f1", "status"});
  for (const SweepRow& r : rows)
    w.AddRow({r.kind, std::to_string(r.m_best), FormatDouble(r.beta), std::to_string(r.seed),
              FormatMetric(r.per), FormatMetric(r.f1), FormatMetric(r.dar),
              FormatMetric(r.mean_utterance_f1), StatusCell(r.status)});
}

std::vector<SweepRow> ReadSweepCsv(const std::string& path) {
  const CsvTable t = ReadCsv(path);
  const std::size_t kind = t.Column("kind"), m = t.Column("M"), beta = t.Column("beta"),
                    seed = t.Column("seed"), per = t.Column("per"), f1 = t.Column("f1"),
                    dar = t.Column("dar"), uf1 = t.Column("utt_f1"), status = t.Column("status");
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& c = t.rows[i];
    const std::string where = path + " row " + std::to_string(i + 1);
    SweepRow r;
    r.kind = c[kind];
    r.m_best = static_cast<int>(ParseDouble(c[m], where));
    r.beta = ParseDouble(c[beta], where);
    r.seed = static_cast<std::uint64_t>(ParseDouble(c[seed], where));
    r.per = ParseMetricCell(c[per], where);
    r.f1 = ParseMetricCell(c[f1], where);
    r.dar = ParseMetricCell(c[dar], where);
    r.mean_utterance_f1 = ParseMetricCell(c[uf1], where);
    r.status = c[status];
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SweepRow> AverageOverSeeds(const std::vector<SweepRow>& rows) {
  struct Acc {
    double per = 0, f1 = 0, dar = 0, uf1 = 0;
    int n_per = 0, n_f1 = 0, n_dar = 0, n_uf1 = 0;
  };
  std::map<std::tuple<std::string, int, double>, Acc> acc;
  for (const SweepRow& r : rows) {
    if (r.status != "ok") continue;
    Acc& a = acc[{r.kind, r.m_best, r.beta}];
    if (r.per) a.per += *r.per, ++a.n_per;
    if (r.f1) a.f1 += *r.f1, ++a.n_f1;
    if (r.dar) a.dar += *r.dar, ++a.n_dar;
    if (r.mean_utterance_f1) a.uf1 += *r.mean_utterance_f1, ++a.n_uf1;
  }
  auto mean = [](double s, int n) -> std::optional<double> {
    if (n == 0) return std::nullopt;
    return s / n;
  };
  std::vector<SweepRow> out;
  for (const auto& [key, a] : acc) {
    SweepRow r;
    std::tie(r.kind, r.m_best, r.beta) = key;
    r.per = mean(a.per, a.n_per);
    r.f1 = mean(a.f1, a.n_f1);
    r.dar = mean(a.dar, a.n_dar);
    r.mean_utterance_f1 = mean(a.uf1, a.n_uf1);
    out.push_back(std::move(r));
  }
  return out;
}

void WriteSweepReport(const std::vector<SweepRow>& rows, const std::string& out_dir) {
  MakeDirectories(out_dir);
  const std::vector<SweepRow> avg = AverageOverSeeds(rows);
  {
    CsvWriter w(out_dir + "/sweep_summary.csv",
                {"kind", "M", "beta", "per", "f1", "dar", "utt_f1"});
    for (const SweepRow& r : avg)
      w.AddRow({r.kind, std::to_string(r.m_best), FormatDouble(r.beta), FormatMetric(r.per),
                FormatMetric(r.f1), FormatMetric(r.dar), FormatMetric(r.mean_utterance_f1)});
  }

  std::vector<double> betas;
  std::vector<int> ms;
  std::optional<SweepRow> baseline;
  for (const SweepRow& r : avg) {
    if (r.kind == "baseline") {
      baseline = r;
      continue;
    }
    betas.push_back(r.beta);
    ms.push_back(r.m_best);
  }
  std::sort(betas.begin(), betas.end());
  betas.erase(std::unique(betas.begin(), betas.end()), betas.end());
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  if (ms.empty()) throw ContractError("sweep report: no successful MFC rows");

  auto metric_chart = [&](const std::string& name, const std::string& y_label,
                          std::optional<double> SweepRow::*field, bool by_beta) {
    std::vector<Series> series;
    double lo = INFINITY, hi = -INFINITY;
    if (by_beta) {
      for (int m : ms) {
        Series s{"M=" + std::to_string(m), {}};
        for (const SweepRow& r : avg)
          if (r.kind == "mfc" && r.m_best == m && (r.*field))
            s.points.push_back({r.beta, *(r.*field)});
        for (const auto& p : s.points) lo = std::min(lo, p.first), hi = std::max(hi, p.first);
        series.push_back(std::move(s));
      }
    } else {
      for (double b : betas) {
        Series s{"beta=" + Tick(b), {}};
        for (const SweepRow& r : avg)
          if (r.kind == "mfc" && r.beta == b && (r.*field))
            s.points.push_back({static_cast<double>(r.m_best), *(r.*field)});
        for (const auto& p : s.points) lo = std::min(lo, p.first), hi = std::max(hi, p.first);
        series.push_back(std::move(s));
      }
    }
    if (baseline && ((*baseline).*field) && std::isfinite(lo))
      series.push_back({"CE baseline", {{lo, *((*baseline).*field)}, {hi, *((*baseline).*field)}}});
    ChartSpec spec;
    spec.title = y_label + (by_beta ? " vs. interpolation weight" : " vs. M-best size");
    spec.x_label = by_beta ? "beta" : "M";
    spec.y_label = y_label;
    WriteFile(out_dir + "/" + name, RenderLineChart(spec, series));
  };
  metric_chart("f1_vs_beta.svg", "F1", &SweepRow::f1, true);
  metric_chart("per_vs_beta.svg", "PER", &SweepRow::per, true);
  metric_chart("f1_vs_m.svg", "F1", &SweepRow::f1, false);
}

}  // namespace mdd
