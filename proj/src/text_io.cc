// src/text_io.cc

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

#include "mdd/text_io.h"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mdd/error.h"

namespace mdd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> SplitCommas(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view StripLine(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return s;
}

json ParseJsonLine(const std::string& line, const std::string& where) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(where + ": " + e.what());
  }
}

std::vector<std::string> Symbols(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw FormatError(where + ": expected an array of phone symbols");
  std::vector<std::string> out;
  for (const json& s : arr) {
    if (!s.is_string()) throw FormatError(where + ": phone symbols must be strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

PhoneSequence EncodeRecord(const PhoneInventory& inv, const json& arr, SequenceRole role,
                           const std::string& where) {
  try {
    return inv.Encode(Symbols(arr, where), role);
  } catch (const LookupError& e) {
    throw LookupError(where + ": " + e.what());
  }
}

Tensor InlineFeatures(const json& rows, const std::string& where) {
  std::size_t dim = 0;
  std::vector<double> values;
  for (const json& row : rows) {
    if (!row.is_array()) throw FormatError(where + ": inline features must be a list of frames");
    if (dim == 0) dim = row.size();
    if (row.size() != dim || dim == 0)
      throw DimensionError(where + ": inline frames have inconsistent dimensions");
    for (const json& v : row) {
      if (!v.is_number()) throw FormatError(where + ": feature values must be numbers");
      values.push_back(v.get<double>());
    }
  }
  if (rows.empty()) throw FormatError(where + ": no feature frames");
  return Tensor({rows.size(), dim}, std::move(values));
}

std::vector<std::string> ReadLines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(std::string(StripLine(line)));
  return lines;
}

}  // namespace

std::string FormatDouble(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw NumericError("cannot format double");
  return std::string(buf, end);
}

std::string FormatMetric(const std::optional<double>& value) {
  return value ? FormatDouble(*value) : std::string("undef");
}

double ParseDouble(std::string_view text, const std::string& where) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  double v = 0.0;
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw FormatError(where + ": cannot parse number '" + std::string(text) + "'");
  return v;
}

void WriteFeatureCsv(const std::string& path, const Tensor& features) {
  if (features.rank() != 2) throw DimensionError("features must be a matrix");
  std::string out = std::string(kFeatureHeader) + "\n";
  for (std::size_t r = 0; r < features.rows(); ++r) {
    for (std::size_t c = 0; c < features.cols(); ++c) {
      if (c) out += ',';
      out += FormatDouble(features.at(r, c));
    }
    out += '\n';
  }
  WriteFile(path, out);
}

Tensor ReadFeatureCsv(const std::string& path) {
  const std::vector<std::string> lines = ReadLines(path);
  if (lines.empty() || lines[0] != kFeatureHeader)
    throw FormatError(path + ": missing '" + kFeatureHeader + "' header");
  std::size_t dim = 0, rows = 0;
  std::vector<double> values;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    const std::vector<std::string> cells = SplitCommas(lines[i]);
    if (dim == 0) dim = cells.size();
    const std::string where = path + ":" + std::to_string(i + 1);
    if (cells.size() != dim)
      throw DimensionError(where + ": expected " + std::to_string(dim) + " values, found " +
                           std::to_string(cells.size()));
    for (const std::string& c : cells) values.push_back(ParseDouble(c, where));
    ++rows;
  }
  if (rows == 0) throw FormatError(path + ": no feature frames");
  return Tensor({rows, dim}, std::move(values));
}

void SaveManifest(const std::string& path, const std::vector<Utterance>& corpus,
                  const PhoneInventory& inventory, const ManifestOptions& options) {
  const fs::path base = fs::path(path).parent_path();
  if (!base.empty()) MakeDirectories(base.string());
  json header = {{"format", "mdd-manifest"}, {"version", kManifestVersion}};
  header["feature_dim"] = corpus.empty() ? 0 : corpus[0].feature_dim();
  std::string out = header.dump() + "\n";
  if (!options.inline_features && options.write_feature_files && !corpus.empty())
    MakeDirectories((base / options.feature_dir).string());
  for (const Utterance& u : corpus) {
    json rec;
    rec["id"] = u.id;
    if (options.inline_features) {
      json rows = json::array();
      for (std::size_t r = 0; r < u.features.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < u.features.cols(); ++c) row.push_back(u.features.at(r, c));
        rows.push_back(std::move(row));
      }
      rec["features"] = std::move(rows);
    } else {
      const std::string rel = (fs::path(options.feature_dir) / (u.id + ".csv")).generic_string();
      if (options.write_feature_files) WriteFeatureCsv((base / rel).string(), u.features);
      rec["features"] = rel;
    }
    rec["canonical"] = inventory.Decode(u.canonical.ids);
    if (u.reference) rec["reference"] = inventory.Decode(u.reference->ids);
    out += rec.dump() + "\n";
  }
  WriteFile(path, out);
}

std::vector<Utterance> LoadManifest(const std::string& path, const PhoneInventory& inventory) {
  const std::vector<std::string> lines = ReadLines(path);
  if (lines.empty()) throw FormatError(path + ": empty manifest");
  const json header = ParseJsonLine(lines[0], path + ":1");
  if (!header.is_object() || header.value("format", "") != "mdd-manifest")
    throw FormatError(path + ": not an mdd-manifest file");
  if (header.value("version", -1) != kManifestVersion)
    throw FormatError(path + ": unsupported manifest version " +
                      header.value("version", json(nullptr)).dump());
  const int declared_dim = header.value("feature_dim", 0);
  const fs::path base = fs::path(path).parent_path();

  std::vector<Utterance> corpus;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const json rec = ParseJsonLine(lines[i], path + ":" + std::to_string(i + 1));
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string())
      throw FormatError(path + ":" + std::to_string(i + 1) + ": record without a string id");
    Utterance u;
    u.id = rec["id"].get<std::string>();
    const std::string where = "record '" + u.id + "'";
    if (!rec.contains("features")) throw FormatError(where + ": missing features");
    if (!rec.contains("canonical")) throw FormatError(where + ": missing canonical phones");
    const json& feats = rec["features"];
    if (feats.is_string()) {
      const fs::path fp = base / feats.get<std::string>();
      if (!fs::exists(fp)) throw IoError(where + ": feature file '" + fp.string() + "' not found");
      u.features = ReadFeatureCsv(fp.string());
    } else if (feats.is_array()) {
      u.features = InlineFeatures(feats, where);
    } else {
      throw FormatError(where + ": features must be a path or an inline matrix");
    }
    if (declared_dim > 0 && u.feature_dim() != declared_dim)
      throw DimensionError(where + ": feature dimension " + std::to_string(u.feature_dim()) +
                           " does not match the manifest's " + std::to_string(declared_dim));
    if (!corpus.empty() && u.feature_dim() != corpus[0].feature_dim())
      throw DimensionError(where + ": feature dimension " + std::to_string(u.feature_dim()) +
                           " differs from earlier records (" +
                           std::to_string(corpus[0].feature_dim()) + ")");
    u.canonical = EncodeRecord(inventory, rec["canonical"], SequenceRole::kCanonical, where);
    if (rec.contains("reference") && !rec["reference"].is_null())
      u.reference = EncodeRecord(inventory, rec["reference"], SequenceRole::kReference, where);
    for (const Utterance& prev : corpus)
      if (prev.id == u.id) throw FormatError(where + ": duplicate id");
    corpus.push_back(std::move(u));
  }
  return corpus;
}

void SaveHypotheses(const std::string& path, const std::vector<DecodedUtterance>& decoded,
                    const PhoneInventory& inventory, double alpha) {
  int m_best = 0;
  for (const DecodedUtterance& d : decoded) m_best = std::max(m_best, d.hypotheses.m_best);
  json header = {{"format", "mdd-hypotheses"},
                 {"version", kHypothesesVersion},
                 {"m_best", m_best},
                 {"alpha", alpha}};
  std::string out = header.dump() + "\n";
  for (const DecodedUtterance& d : decoded) {
    json hyps = json::array();
    int rank = 1;
    for (const Hypothesis& h : d.hypotheses.hypotheses) {
      hyps.push_back({{"rank", rank++},
                      {"phones", inventory.Decode(h.phones.ids)},
                      {"ctc_log_prob", h.ctc_log_prob},
                      {"att_log_prob", h.att_log_prob},
                      {"joint_score", h.joint_score}});
    }
    out += json({{"id", d.id}, {"hypotheses", std::move(hyps)}}).dump() + "\n";
  }
  WriteFile(path, out);
}

std::vector<DecodedUtterance> LoadHypotheses(const std::string& path,
                                             const PhoneInventory& inventory) {
  const std::vector<std::string> lines = ReadLines(path);
  if (lines.empty()) throw FormatError(path + ": empty hypothesis file");
  const json header = ParseJsonLine(lines[0], path + ":1");
  if (!header.is_object() || header.value("format", "") != "mdd-hypotheses")
    throw FormatError(path + ": not an mdd-hypotheses file");
  if (header.value("version", -1) != kHypothesesVersion)
    throw FormatError(path + ": unsupported hypotheses version");
  const int m_best = header.value("m_best", 0);
  std::vector<DecodedUtterance> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string loc = path + ":" + std::to_string(i + 1);
    const json rec = ParseJsonLine(lines[i], loc);
    try {
      DecodedUtterance d;
      d.id = rec.at("id").get<std::string>();
      d.hypotheses.m_best = m_best;
      for (const json& h : rec.at("hypotheses")) {
        Hypothesis hyp;
        hyp.phones = EncodeRecord(inventory, h.at("phones"), SequenceRole::kHypothesis,
                                  "utterance '" + d.id + "'");
        hyp.ctc_log_prob = h.at("ctc_log_prob").get<double>();
        hyp.att_log_prob = h.at("att_log_prob").get<double>();
        hyp.joint_score = h.at("joint_score").get<double>();
        d.hypotheses.hypotheses.push_back(std::move(hyp));
      }
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw FormatError(loc + ": " + e.what());
    }
  }
  return out;
}

struct CsvWriter::Impl {
  std::string path;
  std::size_t columns;
  std::string buffer;
};

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> header)
    : impl_(new Impl{path, header.size(), std::string(kCsvVersionLine) + "\n"}) {
  AddRow(header);
}

CsvWriter::~CsvWriter() {
  try {
    Flush();
  } catch (...) {
  }
  delete impl_;
}

void CsvWriter::AddRow(const std::vector<std::string>& cells) {
  if (cells.size() != impl_->columns)
    throw DimensionError("csv row has " + std::to_string(cells.size()) + " cells, header has " +
                         std::to_string(impl_->columns));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) impl_->buffer += ',';
    impl_->buffer += cells[i];
  }
  impl_->buffer += '\n';
}

void CsvWriter::Flush() { WriteFile(impl_->path, impl_->buffer); }

std::size_t CsvTable::Column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw LookupError("csv: no column '" + std::string(name) + "'");
}

CsvTable ReadCsv(const std::string& path) {
  CsvTable t;
  bool have_header = false;
  for (const std::string& line : ReadLines(path)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells = SplitCommas(line);
    if (!have_header) {
      t.header = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size())
      throw FormatError(path + ": row with " + std::to_string(cells.size()) + " cells, expected " +
                        std::to_string(t.header.size()));
    t.rows.push_back(std::move(cells));
  }
  if (!have_header) throw FormatError(path + ": no header row");
  return t;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

void MakeDirectories(const std::string& path) {
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory '" + path + "': " + ec.message());
}

}  // namespace mdd
