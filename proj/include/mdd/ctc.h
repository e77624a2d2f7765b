// mdd/ctc.h

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

#ifndef MDD_CTC_H_
#define MDD_CTC_H_

#include <span>
#include <vector>

#include "mdd/phone_inventory.h"
#include "mdd/tape.h"
#include "mdd/tensor.h"

namespace mdd {

/// Log-probability returned for targets no alignment can produce. Finite so
/// that rescoring can still rank such hypotheses last.
inline constexpr double kCtcUnreachable = -1e30;

/// Removes repeated symbols, then blanks.
PhoneSequence CtcCollapse(std::span<const int> alignment, int blank);

/**
   Forward-backward lattice over the blank-interleaved target
   (blank y1 blank y2 ... yL blank, length 2L+1). Cells are log-domain;
   unreachable cells hold -infinity.
*/
struct CtcLattice {
  std::vector<int> extended;
  Tensor log_alpha;  // T' x (2L+1)
  Tensor log_beta;   // T' x (2L+1), including the emission at t
  /// log P(y|X), or kCtcUnreachable.
  double log_likelihood = kCtcUnreachable;

  bool reachable() const { return log_likelihood > kCtcUnreachable; }
  /// logsumexp over s of alpha_t(s) + beta_t(s) - log p_t(ext[s]); equals
  /// log_likelihood at every frame t.
  double LogLikelihoodAt(std::size_t t, const Tensor& log_probs) const;
};

/// log_probs is T' x (V+1) with the blank in the last column.
CtcLattice CtcForwardBackward(const Tensor& log_probs, std::span<const int> target);

/// log P_CTC(target | X), or kCtcUnreachable. Throws ContractError when the
/// target contains the blank index or an out-of-range index.
double CtcLogProb(const Tensor& log_probs, std::span<const int> target);

/// d log P / d log_probs[t][k]: the posterior occupancy of symbol k at frame t.
Tensor CtcOccupancy(const Tensor& log_probs, std::span<const int> target);

/// Gradient of log P_CTC(target) with respect to the unnormalised logits,
/// assuming log_probs = log_softmax(logits) row-wise. Throws ContractError for
/// unreachable targets.
Tensor CtcGrad(const Tensor& log_probs, std::span<const int> target);

/// Reference value by enumerating all (V+1)^T' alignments. Throws SizeError
/// beyond 10^6 alignments.
double CtcBruteForce(const Tensor& log_probs, std::span<const int> target);

/// Taped log P_CTC(target). Unreachable targets record kCtcUnreachable and
/// pass no gradient.
Var CtcLogProb(Var log_probs, std::span<const int> target);

}  // namespace mdd

#endif  // MDD_CTC_H_
