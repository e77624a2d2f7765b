// mdd/text_io.h

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

#ifndef MDD_TEXT_IO_H_
#define MDD_TEXT_IO_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mdd/nbest.h"
#include "mdd/phone_inventory.h"

namespace mdd {

/// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double value);
/// "undef" for std::nullopt.
std::string FormatMetric(const std::optional<double>& value);
/// Throws FormatError mentioning `where` on malformed input.
double ParseDouble(std::string_view text, const std::string& where);

inline constexpr const char* kFeatureHeader = "# mdd-features v1";
inline constexpr const char* kCsvVersionLine = "# format-version: 1";
inline constexpr int kManifestVersion = 1;
inline constexpr int kHypothesesVersion = 1;

/// One frame per row, comma separated, after a version comment line.
void WriteFeatureCsv(const std::string& path, const Tensor& features);
Tensor ReadFeatureCsv(const std::string& path);

struct ManifestOptions {
  /// Store features inside the manifest instead of per-utterance CSV files.
  bool inline_features = false;
  /// Directory for feature files, relative to the manifest's directory.
  std::string feature_dir = "features";
  /// False when another manifest in the same directory already wrote them.
  bool write_feature_files = true;
};

/**
   JSON-lines manifest. The first line is a header
     {"format": "mdd-manifest", "version": 1, "feature_dim": d}
   followed by one record per utterance:
     {"id": ..., "features": "<relative csv path>" | [[...], ...],
      "canonical": [symbols], "reference": [symbols]}
   "reference" is omitted for decode-only data.
*/
void SaveManifest(const std::string& path, const std::vector<Utterance>& corpus,
                  const PhoneInventory& inventory, const ManifestOptions& options = {});

/// Relative feature paths resolve against the manifest's directory. Errors
/// name the offending record.
std::vector<Utterance> LoadManifest(const std::string& path, const PhoneInventory& inventory);

struct DecodedUtterance {
  std::string id;
  HypothesisList hypotheses;
};

/**
   JSON-lines hypothesis file: header
     {"format": "mdd-hypotheses", "version": 1, "m_best": M, "alpha": a}
   then per utterance
     {"id": ..., "hypotheses": [{"rank": r, "phones": [...], "ctc_log_prob": .,
                                 "att_log_prob": ., "joint_score": .}, ...]}
*/
void SaveHypotheses(const std::string& path, const std::vector<DecodedUtterance>& decoded,
                    const PhoneInventory& inventory, double alpha);
std::vector<DecodedUtterance> LoadHypotheses(const std::string& path,
                                             const PhoneInventory& inventory);

/// Comma-separated table preceded by the format-version comment line.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::vector<std::string> header);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void AddRow(const std::vector<std::string>& cells);
  void Flush();

 private:
  struct Impl;
  Impl* impl_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws LookupError for an unknown column.
  std::size_t Column(std::string_view name) const;
};

/// Skips '#' comment lines; the first remaining line is the header.
CsvTable ReadCsv(const std::string& path);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view contents);
/// Creates the directory and its parents.
void MakeDirectories(const std::string& path);

}  // namespace mdd

#endif  // MDD_TEXT_IO_H_
