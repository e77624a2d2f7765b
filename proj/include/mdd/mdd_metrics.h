// mdd/mdd_metrics.h

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

#ifndef MDD_MDD_METRICS_H_
#define MDD_MDD_METRICS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mdd/phone_inventory.h"

namespace mdd {

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

/// One alignment step. a_pos / b_pos are -1 where the step does not consume
/// that side (b_pos for deletions, a_pos for insertions).
struct AlignmentStep {
  EditOp op;
  int a_pos;
  int b_pos;
  bool operator==(const AlignmentStep&) const = default;
};

struct AlignmentTrace {
  std::vector<AlignmentStep> steps;

  /// Substitutions + deletions + insertions.
  int cost() const;
  int count(EditOp op) const;
};

/// Minimum-cost unit-cost alignment of a against b. Ties are broken during
/// the backtrace from the end in the order match, substitute, delete, insert.
AlignmentTrace Align(std::span<const int> a, std::span<const int> b);

/// Plain Levenshtein distance.
int EditDistance(std::span<const int> a, std::span<const int> b);

enum class PositionKind { kCorrect, kSubstituted, kDeleted };

struct PositionLabel {
  PositionKind kind = PositionKind::kCorrect;
  int phone = -1;  // the substituted phone, else -1
  bool operator==(const PositionLabel&) const = default;
};

/// Per canonical position labels derived from Align(canonical, other).
struct AnchoredLabels {
  std::vector<PositionLabel> positions;
  /// gap_insertions[g] counts insertions after g canonical phones were
  /// consumed; size canonical.size() + 1.
  std::vector<int> gap_insertions;
  int insertions = 0;
};

AnchoredLabels CanonicalAnchoredLabels(std::span<const int> canonical,
                                       std::span<const int> other);

/**
   Confusion counts over canonical positions, mispronunciation being the
   negative class:
     tp  reference correct, hypothesis correct
     fp  reference mispronounced, hypothesis correct
     fn  reference correct, hypothesis mispronounced
     tn  both mispronounced; cd when the diagnoses agree exactly, id otherwise
   c_h / c_d count mispronounced positions plus insertions on the reference
   / hypothesis side; c_dh counts positions flagged by both plus, per
   inter-canonical gap, min(reference insertions, hypothesis insertions).
   phone_errors / reference_length feed the phone error rate.
*/
struct MddCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::int64_t cd = 0, id = 0;
  std::int64_t c_d = 0, c_h = 0, c_dh = 0;
  std::int64_t insertions_detected = 0, insertions_annotated = 0;
  std::int64_t phone_errors = 0, reference_length = 0;

  MddCounts& operator+=(const MddCounts& o);
  bool operator==(const MddCounts&) const = default;
  std::int64_t positions() const { return tp + fp + fn + tn; }
};

MddCounts ComputeMddCounts(std::span<const int> canonical, std::span<const int> reference,
                           std::span<const int> hypothesis);

/// 2 c_dh / (c_d + c_h); 1.0 when nobody flagged anything.
double UtteranceF1(const MddCounts& counts);

/// Metrics with an undefined denominator are std::nullopt.
struct MetricReport {
  std::optional<double> recall, precision, f1, dar, per;
  MddCounts totals;
  std::size_t num_utterances = 0;
};

/// Sums counts, then RE = TN/(FP+TN), PR = TN/(FN+TN), F1, DAR = CD/(CD+ID)
/// and PER = errors / reference phones. Throws ContractError for an empty
/// list.
MetricReport CorpusMetrics(std::span<const MddCounts> counts);

/// Harmonic mean; nullopt when either input is undefined or both are zero.
std::optional<double> HarmonicF1(std::optional<double> precision, std::optional<double> recall);

struct ScoredUtterance {
  std::vector<int> canonical;
  std::vector<int> reference;
  std::vector<int> hypothesis;
};

struct PhoneMetrics {
  MddCounts counts;  // only tp/fp/fn/tn/cd/id are filled
  std::optional<double> recall, precision, f1;
};

/// Confusion counts restricted to canonical positions holding each phone.
/// Phones that never occur on the canonical side are absent.
std::map<int, PhoneMetrics> PerPhoneMetrics(std::span<const ScoredUtterance> corpus);

}  // namespace mdd

#endif  // MDD_MDD_METRICS_H_
