// src/mfc_loss.cc

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

#include "mdd/mfc_loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdd/ctc.h"
#include "mdd/error.h"
#include "mdd/mdd_metrics.h"

namespace mdd {

namespace {

// -(alpha * ctc + (1 - alpha) * att), matching JointScore's arithmetic.
Var JointLogLikelihood(const BoundModel& model, const EncodedGraph& enc, std::span<const int> y,
                       double alpha, bool* ctc_unreachable) {
  Var ctc = CtcLogProb(enc.ctc_log_probs, y);
  if (ctc_unreachable) *ctc_unreachable = ctc.item() <= kCtcUnreachable;
  Var att = AttLogProb(model, enc, y);
  return Add(Scale(ctc, alpha), Scale(att, 1.0 - alpha));
}

const PhoneSequence& RequireReference(const Utterance& utt, const char* where) {
  if (!utt.reference)
    throw ContractError(std::string(where) + ": utterance '" + utt.id + "' has no reference");
  return *utt.reference;
}

}  // namespace

void LossConfig::Validate() const {
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("loss: alpha must lie in [0, 1]");
  if (beta < 0.0 || beta > 1.0) throw ConfigError("loss: beta must lie in [0, 1]");
  if (m_best < 1) throw ConfigError("loss: M must be >= 1");
  if (beam_width < m_best) throw ConfigError("loss: beam width must be >= M");
}

SearchConfig LossConfig::Search() const {
  SearchConfig s;
  s.beam_width = beam_width;
  s.m_best = m_best;
  s.max_len = max_len;
  s.alpha = alpha;
  return s;
}

Var CeLoss(const BoundModel& model, const EncodedGraph& enc, const Utterance& utt, double alpha,
           bool* ctc_unreachable) {
  const PhoneSequence& ref = RequireReference(utt, "CeLoss");
  return Scale(JointLogLikelihood(model, enc, ref.ids, alpha, ctc_unreachable), -1.0);
}

Var ExpectedF1Loss(std::span<const Var> joint_scores, std::span<const double> f_scores) {
  if (joint_scores.empty()) throw ContractError("ExpectedF1Loss: empty hypothesis list");
  if (joint_scores.size() != f_scores.size())
    throw DimensionError("ExpectedF1Loss: " + std::to_string(joint_scores.size()) +
                         " scores but " + std::to_string(f_scores.size()) + " F-scores");
  Tape& tape = *joint_scores[0].tape();
  std::vector<Var> cols;
  cols.reserve(joint_scores.size());
  for (const Var& s : joint_scores) cols.push_back(Reshape(s, {1}));
  Var posterior = Softmax(Concat(cols, 0), 0);
  Var f = tape.Constant(Tensor({f_scores.size()}, std::vector<double>(f_scores.begin(), f_scores.end())));
  return Scale(Sum(Mul(posterior, f)), -1.0);
}

std::vector<double> HypothesisFScores(const Utterance& utt, const HypothesisList& hyps) {
  const PhoneSequence& ref = RequireReference(utt, "HypothesisFScores");
  std::vector<double> f;
  f.reserve(hyps.size());
  for (const Hypothesis& h : hyps.hypotheses)
    f.push_back(UtteranceF1(ComputeMddCounts(utt.canonical.ids, ref.ids, h.phones.ids)));
  return f;
}

Var MfcLoss(const BoundModel& model, const EncodedGraph& enc, const Utterance& utt,
            const HypothesisList& hyps, double alpha, LossBreakdown* diagnostics) {
  if (hyps.empty()) throw ContractError("MfcLoss: empty hypothesis list");
  const std::vector<double> f = HypothesisFScores(utt, hyps);
  std::vector<Var> scores;
  scores.reserve(hyps.size());
  for (const Hypothesis& h : hyps.hypotheses)
    scores.push_back(JointLogLikelihood(model, enc, h.phones.ids, alpha, nullptr));
  Var loss = ExpectedF1Loss(scores, f);
  if (diagnostics) {
    diagnostics->f_scores = f;
    double mx = -INFINITY;
    for (const Var& s : scores) mx = std::max(mx, s.item());
    double z = 0.0;
    diagnostics->posteriors.clear();
    for (const Var& s : scores) {
      diagnostics->posteriors.push_back(std::exp(s.item() - mx));
      z += diagnostics->posteriors.back();
    }
    for (double& p : diagnostics->posteriors) p /= z;
    diagnostics->mfc_loss = loss.item();
  }
  return loss;
}

UtteranceLoss TotalLoss(const BoundModel& model, const ModelParams& params, const Utterance& utt,
                        const LossConfig& config) {
  config.Validate();
  UtteranceLoss out;
  const EncodedGraph enc = Encode(model, utt.features);
  Var ce = CeLoss(model, enc, utt, config.alpha, &out.breakdown.ce_unreachable);

  const EncoderOutput values{enc.states.value(), enc.ctc_log_probs.value(),
                             enc.attention_keys.value()};
  out.breakdown.hypotheses = BeamSearch(params, values, config.Search());
  Var mfc = MfcLoss(model, enc, utt, out.breakdown.hypotheses, config.alpha, &out.breakdown);

  out.total = Add(Scale(mfc, config.beta), Scale(ce, 1.0 - config.beta));
  out.breakdown.ce_loss = ce.item();
  out.breakdown.total = out.total.item();
  return out;
}

BatchLoss ComputeBatchLoss(const BoundModel& model, const ModelParams& params,
                           std::span<const Utterance* const> batch, const LossConfig& config,
                           Objective objective) {
  if (batch.empty()) throw ContractError("ComputeBatchLoss: empty batch");
  std::vector<const Utterance*> order(batch.begin(), batch.end());
  std::sort(order.begin(), order.end(),
            [](const Utterance* a, const Utterance* b) { return a->id < b->id; });
  BatchLoss out;
  std::vector<Var> losses;
  losses.reserve(order.size());
  for (const Utterance* u : order) {
    if (objective == Objective::kCrossEntropy) {
      LossBreakdown b;
      const EncodedGraph enc = Encode(model, u->features);
      Var ce = CeLoss(model, enc, *u, config.alpha, &b.ce_unreachable);
      b.ce_loss = b.total = ce.item();
      losses.push_back(Reshape(ce, {1}));
      out.breakdowns.push_back(std::move(b));
    } else {
      UtteranceLoss l = TotalLoss(model, params, *u, config);
      losses.push_back(Reshape(l.total, {1}));
      out.breakdowns.push_back(std::move(l.breakdown));
    }
  }
  out.loss = Mean(Concat(losses, 0));
  return out;
}

}  // namespace mdd
