// mdd/mfc_loss.h

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

#ifndef MDD_MFC_LOSS_H_
#define MDD_MFC_LOSS_H_

#include <span>
#include <vector>

#include "mdd/acoustic_model.h"
#include "mdd/nbest.h"
#include "mdd/phone_inventory.h"
#include "mdd/tape.h"

namespace mdd {

struct LossConfig {
  double alpha = 0.3;  // CTC weight inside the joint log-likelihood
  double beta = 0.9;   // weight of the expected-F1 term against cross-entropy
  int m_best = 8;
  int beam_width = 8;
  int max_len = 0;     // <= 0: encoder length

  void Validate() const;
  SearchConfig Search() const;
  bool operator==(const LossConfig&) const = default;
};

struct LossBreakdown {
  double ce_loss = 0.0;
  double mfc_loss = 0.0;
  double total = 0.0;
  /// Utterance F1 of each hypothesis and its normalised posterior.
  std::vector<double> f_scores;
  std::vector<double> posteriors;
  HypothesisList hypotheses;
  /// The reference cannot be produced by CTC in the available frames; the
  /// CE term then carries the sentinel magnitude and no CTC gradient.
  bool ce_unreachable = false;
};

/// -(alpha log P_CTC(y*|X) + (1 - alpha) log P_ATT(y*|X)). Throws
/// ContractError when the utterance has no reference.
Var CeLoss(const BoundModel& model, const EncodedGraph& enc, const Utterance& utt, double alpha,
           bool* ctc_unreachable = nullptr);

/// -sum_m F_m softmax(scores)_m over scalar score variables. The F_m are
/// constants. Throws ContractError for an empty list.
Var ExpectedF1Loss(std::span<const Var> joint_scores, std::span<const double> f_scores);

/// Expected-F1 loss over a frozen hypothesis list; the joint scores are
/// recomputed on the tape so gradients flow into the model.
Var MfcLoss(const BoundModel& model, const EncodedGraph& enc, const Utterance& utt,
            const HypothesisList& hyps, double alpha, LossBreakdown* diagnostics = nullptr);

/// F_m for every hypothesis against the utterance's canonical and reference
/// sequences.
std::vector<double> HypothesisFScores(const Utterance& utt, const HypothesisList& hyps);

struct UtteranceLoss {
  Var total;
  LossBreakdown breakdown;
};

/// beta * MFC + (1 - beta) * CE for one utterance. The M-best list is
/// regenerated from the current parameter values.
UtteranceLoss TotalLoss(const BoundModel& model, const ModelParams& params, const Utterance& utt,
                        const LossConfig& config);

enum class Objective { kCrossEntropy, kInterpolated };

struct BatchLoss {
  Var loss;  // mean over the batch
  std::vector<LossBreakdown> breakdowns;  // in evaluation order
};

/// Mean loss over the batch. Utterances are evaluated in ascending id order,
/// so the value does not depend on the order they were passed in.
BatchLoss ComputeBatchLoss(const BoundModel& model, const ModelParams& params,
                           std::span<const Utterance* const> batch, const LossConfig& config,
                           Objective objective);

}  // namespace mdd

#endif  // MDD_MFC_LOSS_H_
