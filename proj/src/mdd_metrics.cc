// src/mdd_metrics.cc

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

#include "mdd/mdd_metrics.h"

#include <algorithm>
#include <string>

#include "mdd/error.h"

namespace mdd {

namespace {

enum class Outcome { kTp, kFp, kFn, kTnCorrectDiagnosis, kTnIncorrectDiagnosis };

Outcome Classify(const PositionLabel& ref, const PositionLabel& hyp) {
  const bool ref_ok = ref.kind == PositionKind::kCorrect;
  const bool hyp_ok = hyp.kind == PositionKind::kCorrect;
  if (ref_ok && hyp_ok) return Outcome::kTp;
  if (!ref_ok && hyp_ok) return Outcome::kFp;
  if (ref_ok) return Outcome::kFn;
  return ref == hyp ? Outcome::kTnCorrectDiagnosis : Outcome::kTnIncorrectDiagnosis;
}

void Tally(Outcome o, MddCounts* c) {
  switch (o) {
    case Outcome::kTp: ++c->tp; break;
    case Outcome::kFp: ++c->fp; break;
    case Outcome::kFn: ++c->fn; break;
    case Outcome::kTnCorrectDiagnosis: ++c->tn; ++c->cd; break;
    case Outcome::kTnIncorrectDiagnosis: ++c->tn; ++c->id; break;
  }
}

std::optional<double> Ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

int AlignmentTrace::cost() const {
  int c = 0;
  for (const AlignmentStep& s : steps) c += s.op == EditOp::kMatch ? 0 : 1;
  return c;
}

int AlignmentTrace::count(EditOp op) const {
  return static_cast<int>(
      std::count_if(steps.begin(), steps.end(), [op](const AlignmentStep& s) { return s.op == op; }));
}

AlignmentTrace Align(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<int> d((n + 1) * (m + 1));
  auto at = [&d, m](std::size_t i, std::size_t j) -> int& { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  AlignmentTrace trace;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const int here = at(i, j);
    const int ai = static_cast<int>(i) - 1, bj = static_cast<int>(j) - 1;
    if (i > 0 && j > 0 && a[i - 1] == b[j - 1] && at(i - 1, j - 1) == here) {
      trace.steps.push_back({EditOp::kMatch, ai, bj});
      --i, --j;
    } else if (i > 0 && j > 0 && a[i - 1] != b[j - 1] && at(i - 1, j - 1) + 1 == here) {
      trace.steps.push_back({EditOp::kSubstitute, ai, bj});
      --i, --j;
    } else if (i > 0 && at(i - 1, j) + 1 == here) {
      trace.steps.push_back({EditOp::kDelete, ai, -1});
      --i;
    } else {
      trace.steps.push_back({EditOp::kInsert, -1, bj});
      --j;
    }
  }
  std::reverse(trace.steps.begin(), trace.steps.end());
  return trace;
}

int EditDistance(std::span<const int> a, std::span<const int> b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

AnchoredLabels CanonicalAnchoredLabels(std::span<const int> canonical,
                                       std::span<const int> other) {
  AnchoredLabels out;
  out.positions.resize(canonical.size());
  out.gap_insertions.assign(canonical.size() + 1, 0);
  std::size_t consumed = 0;
  for (const AlignmentStep& s : Align(canonical, other).steps) {
    switch (s.op) {
      case EditOp::kMatch:
        out.positions[static_cast<std::size_t>(s.a_pos)] = {PositionKind::kCorrect, -1};
        ++consumed;
        break;
      case EditOp::kSubstitute:
        out.positions[static_cast<std::size_t>(s.a_pos)] = {
            PositionKind::kSubstituted, other[static_cast<std::size_t>(s.b_pos)]};
        ++consumed;
        break;
      case EditOp::kDelete:
        out.positions[static_cast<std::size_t>(s.a_pos)] = {PositionKind::kDeleted, -1};
        ++consumed;
        break;
      case EditOp::kInsert:
        ++out.gap_insertions[consumed];
        ++out.insertions;
        break;
    }
  }
  return out;
}

MddCounts& MddCounts::operator+=(const MddCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  cd += o.cd;
  id += o.id;
  c_d += o.c_d;
  c_h += o.c_h;
  c_dh += o.c_dh;
  insertions_detected += o.insertions_detected;
  insertions_annotated += o.insertions_annotated;
  phone_errors += o.phone_errors;
  reference_length += o.reference_length;
  return *this;
}

MddCounts ComputeMddCounts(std::span<const int> canonical, std::span<const int> reference,
                           std::span<const int> hypothesis) {
  const AnchoredLabels ref = CanonicalAnchoredLabels(canonical, reference);
  const AnchoredLabels hyp = CanonicalAnchoredLabels(canonical, hypothesis);
  MddCounts c;
  std::int64_t ref_mp = 0, hyp_mp = 0;
  for (std::size_t k = 0; k < canonical.size(); ++k) {
    Tally(Classify(ref.positions[k], hyp.positions[k]), &c);
    ref_mp += ref.positions[k].kind != PositionKind::kCorrect;
    hyp_mp += hyp.positions[k].kind != PositionKind::kCorrect;
  }
  std::int64_t shared_insertions = 0;
  for (std::size_t g = 0; g < ref.gap_insertions.size(); ++g)
    shared_insertions += std::min(ref.gap_insertions[g], hyp.gap_insertions[g]);
  c.insertions_annotated = ref.insertions;
  c.insertions_detected = hyp.insertions;
  c.c_h = ref_mp + ref.insertions;
  c.c_d = hyp_mp + hyp.insertions;
  c.c_dh = c.tn + shared_insertions;
  c.phone_errors = EditDistance(reference, hypothesis);
  c.reference_length = static_cast<std::int64_t>(reference.size());
  return c;
}

double UtteranceF1(const MddCounts& c) {
  const std::int64_t den = c.c_d + c.c_h;
  if (den == 0) return 1.0;
  return 2.0 * static_cast<double>(c.c_dh) / static_cast<double>(den);
}

std::optional<double> HarmonicF1(std::optional<double> precision, std::optional<double> recall) {
  if (!precision || !recall) return std::nullopt;
  const double den = *precision + *recall;
  if (den <= 0.0) return std::nullopt;
  return 2.0 * *precision * *recall / den;
}

MetricReport CorpusMetrics(std::span<const MddCounts> counts) {
  if (counts.empty()) throw ContractError("CorpusMetrics: no utterances");
  MetricReport r;
  for (const MddCounts& c : counts) r.totals += c;
  r.num_utterances = counts.size();
  const MddCounts& t = r.totals;
  r.recall = Ratio(t.tn, t.fp + t.tn);
  r.precision = Ratio(t.tn, t.fn + t.tn);
  r.f1 = HarmonicF1(r.precision, r.recall);
  r.dar = Ratio(t.cd, t.cd + t.id);
  r.per = Ratio(t.phone_errors, t.reference_length);
  return r;
}

std::map<int, PhoneMetrics> PerPhoneMetrics(std::span<const ScoredUtterance> corpus) {
  std::map<int, PhoneMetrics> out;
  for (const ScoredUtterance& u : corpus) {
    const AnchoredLabels ref = CanonicalAnchoredLabels(u.canonical, u.reference);
    const AnchoredLabels hyp = CanonicalAnchoredLabels(u.canonical, u.hypothesis);
    for (std::size_t k = 0; k < u.canonical.size(); ++k)
      Tally(Classify(ref.positions[k], hyp.positions[k]), &out[u.canonical[k]].counts);
  }
  for (auto& [phone, m] : out) {
    m.recall = Ratio(m.counts.tn, m.counts.fp + m.counts.tn);
    m.precision = Ratio(m.counts.tn, m.counts.fn + m.counts.tn);
    m.f1 = HarmonicF1(m.precision, m.recall);
  }
  return out;
}

}  // namespace mdd
