// mdd/nbest.h

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

#ifndef MDD_NBEST_H_
#define MDD_NBEST_H_

#include <vector>

#include "mdd/acoustic_model.h"
#include "mdd/phone_inventory.h"

namespace mdd {

/// alpha * ctc + (1 - alpha) * att.
inline double JointScore(double alpha, double ctc_log_prob, double att_log_prob) {
  return alpha * ctc_log_prob + (1.0 - alpha) * att_log_prob;
}

struct Hypothesis {
  PhoneSequence phones;
  double att_log_prob = 0.0;
  double ctc_log_prob = 0.0;
  double joint_score = 0.0;
};

/// Sorted by joint score descending, ties broken by ascending phone ids.
struct HypothesisList {
  std::vector<Hypothesis> hypotheses;
  int m_best = 1;

  std::size_t size() const { return hypotheses.size(); }
  bool empty() const { return hypotheses.empty(); }
  const Hypothesis& front() const { return hypotheses.front(); }
};

struct SearchConfig {
  int beam_width = 8;
  int m_best = 8;
  /// Longest hypothesis considered; <= 0 means the encoder length T'.
  int max_len = 0;
  double alpha = 0.3;
  /// Added per phone to the ranking key only (decode reporting); the stored
  /// joint_score never includes it.
  double length_penalty = 0.0;

  void Validate() const;
};

/// Attention-driven beam search. A hypothesis completes on eos (forced at
/// max_len); completed hypotheses are rescored with the exact CTC
/// log-probability and the best m_best by joint score are returned.
HypothesisList BeamSearch(const ModelParams& params, const EncoderOutput& enc,
                          const SearchConfig& config);

/// Scores every phone sequence up to max_len. Throws SizeError when there are
/// more than 10^5 candidates.
HypothesisList ExhaustiveNbest(const ModelParams& params, const EncoderOutput& enc,
                               const SearchConfig& config);

/// Ranking order used by both searches.
bool HypothesisBefore(const Hypothesis& a, const Hypothesis& b, double length_penalty = 0.0);

}  // namespace mdd

#endif  // MDD_NBEST_H_
