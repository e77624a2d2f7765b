// src/ctc.cc

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

#include "mdd/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mdd/error.h"

namespace mdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double LogAdd(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double mx = std::max(a, b);
  return mx + std::log1p(std::exp(std::min(a, b) - mx));
}

void CheckTarget(const Tensor& log_probs, std::span<const int> target) {
  if (log_probs.rank() != 2 || log_probs.dim(1) < 1)
    throw DimensionError("CTC: log-probabilities must be a T' x (V+1) matrix, got " +
                         ShapeString(log_probs.shape()));
  const int blank = static_cast<int>(log_probs.dim(1)) - 1;
  for (int y : target) {
    if (y == blank) throw ContractError("CTC: target contains the blank symbol");
    if (y < 0 || y > blank)
      throw ContractError("CTC: target index " + std::to_string(y) + " out of range");
  }
}

Tensor OccupancyFromLattice(const CtcLattice& lat, const Tensor& log_probs) {
  Tensor occ(log_probs.shape(), 0.0);
  if (!lat.reachable()) return occ;
  const std::size_t T = log_probs.dim(0), S = lat.extended.size();
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      const double a = lat.log_alpha.at(t, s), b = lat.log_beta.at(t, s);
      if (a == kNegInf || b == kNegInf) continue;
      const std::size_t k = static_cast<std::size_t>(lat.extended[s]);
      occ.at(t, k) += std::exp(a + b - log_probs.at(t, k) - lat.log_likelihood);
    }
  }
  return occ;
}

}  // namespace

PhoneSequence CtcCollapse(std::span<const int> alignment, int blank) {
  PhoneSequence out;
  out.role = SequenceRole::kHypothesis;
  int prev = -1;
  for (int a : alignment) {
    if (a != prev && a != blank) out.ids.push_back(a);
    prev = a;
  }
  return out;
}

double CtcLattice::LogLikelihoodAt(std::size_t t, const Tensor& log_probs) const {
  const std::size_t s_len = extended.size();
  double total = kNegInf;
  for (std::size_t s = 0; s < s_len; ++s) {
    const double a = log_alpha.at(t, s), b = log_beta.at(t, s);
    if (a == kNegInf || b == kNegInf) continue;
    total = LogAdd(total, a + b - log_probs.at(t, static_cast<std::size_t>(extended[s])));
  }
  return total == kNegInf ? kCtcUnreachable : total;
}

CtcLattice CtcForwardBackward(const Tensor& log_probs, std::span<const int> target) {
  CheckTarget(log_probs, target);
  const int blank = static_cast<int>(log_probs.dim(1)) - 1;
  const std::size_t T = log_probs.dim(0);
  const std::size_t L = target.size();
  const std::size_t S = 2 * L + 1;

  CtcLattice lat;
  lat.extended.assign(S, blank);
  for (std::size_t l = 0; l < L; ++l) lat.extended[2 * l + 1] = target[l];
  lat.log_alpha = Tensor({T, S}, kNegInf);
  lat.log_beta = Tensor({T, S}, kNegInf);
  if (T == 0) {
    lat.log_likelihood = L == 0 ? 0.0 : kCtcUnreachable;
    return lat;
  }
  const auto& ext = lat.extended;
  // Skipping s-2 -> s is allowed into a label that differs from the previous
  // label.
  auto can_skip = [&ext](std::size_t s) {
    return s >= 2 && ext[s] != ext[s - 2];
  };

  Tensor& alpha = lat.log_alpha;
  alpha.at(0, 0) = log_probs.at(0, static_cast<std::size_t>(ext[0]));
  if (S > 1) alpha.at(0, 1) = log_probs.at(0, static_cast<std::size_t>(ext[1]));
  for (std::size_t t = 1; t < T; ++t) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = alpha.at(t - 1, s);
      if (s >= 1) acc = LogAdd(acc, alpha.at(t - 1, s - 1));
      if (can_skip(s)) acc = LogAdd(acc, alpha.at(t - 1, s - 2));
      if (acc != kNegInf) acc += log_probs.at(t, static_cast<std::size_t>(ext[s]));
      alpha.at(t, s) = acc;
    }
  }

  Tensor& beta = lat.log_beta;
  beta.at(T - 1, S - 1) = log_probs.at(T - 1, static_cast<std::size_t>(ext[S - 1]));
  if (S > 1) beta.at(T - 1, S - 2) = log_probs.at(T - 1, static_cast<std::size_t>(ext[S - 2]));
  for (std::size_t t = T - 1; t-- > 0;) {
    for (std::size_t s = 0; s < S; ++s) {
      double acc = beta.at(t + 1, s);
      if (s + 1 < S) acc = LogAdd(acc, beta.at(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) acc = LogAdd(acc, beta.at(t + 1, s + 2));
      if (acc != kNegInf) acc += log_probs.at(t, static_cast<std::size_t>(ext[s]));
      beta.at(t, s) = acc;
    }
  }

  double total = alpha.at(T - 1, S - 1);
  if (S > 1) total = LogAdd(total, alpha.at(T - 1, S - 2));
  lat.log_likelihood = total == kNegInf ? kCtcUnreachable : total;
  return lat;
}

double CtcLogProb(const Tensor& log_probs, std::span<const int> target) {
  return CtcForwardBackward(log_probs, target).log_likelihood;
}

Tensor CtcOccupancy(const Tensor& log_probs, std::span<const int> target) {
  return OccupancyFromLattice(CtcForwardBackward(log_probs, target), log_probs);
}

Tensor CtcGrad(const Tensor& log_probs, std::span<const int> target) {
  const CtcLattice lat = CtcForwardBackward(log_probs, target);
  if (!lat.reachable())
    throw ContractError("CtcGrad: target is unreachable in " +
                        std::to_string(log_probs.dim(0)) + " frames");
  Tensor occ = OccupancyFromLattice(lat, log_probs);
  // d/dz_tk sum_j occ_tj * (z_tj - lse_t) = occ_tk - p_tk * sum_j occ_tj, and
  // each occupancy row sums to one.
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] -= std::exp(log_probs[i]);
  return occ;
}

double CtcBruteForce(const Tensor& log_probs, std::span<const int> target) {
  CheckTarget(log_probs, target);
  const std::size_t T = log_probs.dim(0);
  const std::size_t K = log_probs.dim(1);
  const int blank = static_cast<int>(K) - 1;
  double count = 1.0;
  for (std::size_t t = 0; t < T; ++t) count *= static_cast<double>(K);
  if (count > 1e6)
    throw SizeError("CtcBruteForce: " + std::to_string(static_cast<long long>(count)) +
                    " alignments exceed the 10^6 limit");
  const std::vector<int> want(target.begin(), target.end());
  std::vector<int> align(T, 0);
  double total = kNegInf;
  const auto n = static_cast<long long>(count);
  for (long long code = 0; code < n; ++code) {
    long long c = code;
    double lp = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      align[t] = static_cast<int>(c % static_cast<long long>(K));
      c /= static_cast<long long>(K);
      lp += log_probs.at(t, static_cast<std::size_t>(align[t]));
    }
    if (CtcCollapse(align, blank).ids == want) total = LogAdd(total, lp);
  }
  return total == kNegInf ? kCtcUnreachable : total;
}

Var CtcLogProb(Var log_probs, std::span<const int> target) {
  CtcLattice lat = CtcForwardBackward(log_probs.value(), target);
  const double value = lat.log_likelihood;
  const int li = log_probs.id();
  return log_probs.tape()->Record(
      "CtcLogProb", Tensor::Scalar(value), {log_probs},
      [li, lat = std::move(lat)](Tape& t, const Tensor& g) {
        if (!lat.reachable()) return;
        Tensor* gl = t.MutableGrad(li);
        if (!gl) return;
        const Tensor occ = OccupancyFromLattice(lat, t.Value(li));
        for (std::size_t i = 0; i < occ.size(); ++i) (*gl)[i] += g[0] * occ[i];
      });
}

}  // namespace mdd
