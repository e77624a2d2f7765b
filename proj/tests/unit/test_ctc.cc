// tests/unit/test_ctc.cc

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

#include <cmath>

#include "doctest.h"
#include "mdd/ctc.h"
#include "mdd/error.h"
#include "oracles/oracles.h"
#include "test_util.h"

namespace mdd {

namespace {

Tensor Uniform(std::size_t T, std::size_t V) {
  return Tensor({T, V}, std::log(1.0 / static_cast<double>(V)));
}

}  // namespace

TEST_CASE("collapse merges repeats then drops blanks") {
  const int a = 0, b = 1, blank = 2;
  CHECK(CtcCollapse(std::vector<int>{a, a, blank, a, b}, blank).ids == std::vector<int>{a, a, b});
  CHECK(CtcCollapse(std::vector<int>{blank, blank}, blank).ids.empty());
  CHECK(CtcCollapse(std::vector<int>{a, blank, a}, blank).ids == std::vector<int>{a, a});
}

TEST_CASE("two uniform frames over one phone") {
  const Tensor lp = Uniform(2, 2);
  CHECK(std::exp(CtcLogProb(lp, std::vector<int>{0})) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(std::exp(CtcLogProb(lp, std::vector<int>{})) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(CtcLogProb(lp, std::vector<int>{0, 0}) == kCtcUnreachable);
  CHECK(CtcLogProb(lp, std::vector<int>{0, 0, 0}) == kCtcUnreachable);
}

TEST_CASE("blank in the target is a contract error") {
  const Tensor lp = Uniform(3, 3);
  CHECK_THROWS_AS(CtcLogProb(lp, std::vector<int>{2}), ContractError);
  CHECK_THROWS_AS(CtcLogProb(lp, std::vector<int>{-1}), ContractError);
}

TEST_CASE("empty target equals the all-blank path") {
  std::mt19937_64 rng(8);
  const Tensor lp = testing::RandomLogProbs(4, 3, rng);
  double all_blank = 0.0;
  for (std::size_t t = 0; t < 4; ++t) all_blank += lp.at(t, 2);
  CHECK(std::abs(CtcLogProb(lp, std::vector<int>{}) - all_blank) < 1e-12);
  CHECK(std::abs(CtcBruteForce(lp, std::vector<int>{}) - all_blank) < 1e-12);
}

TEST_CASE("forward-backward agrees at every frame") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int T = 2 + trial % 6;
    const Tensor lp = testing::RandomLogProbs(T, 4, rng, 2.0);
    const std::vector<int> y = testing::RandomSequence(rng, 1 + trial % 3, 3);
    const CtcLattice lat = CtcForwardBackward(lp, y);
    CHECK(lat.extended.size() == 2 * y.size() + 1);
    if (!lat.reachable()) continue;
    for (int t = 0; t < T; ++t) CHECK(std::abs(lat.LogLikelihoodAt(t, lp) - lat.log_likelihood) < 1e-9);
  }
}

TEST_CASE("ctc matches enumeration on small instances") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 40; ++trial) {
    const int T = 1 + trial % 4;
    const Tensor lp = testing::RandomLogProbs(T, 3, rng, 2.0);
    for (const auto& y : oracle::AllSequences(2, T)) {
      const double expected = oracle::CtcLogProbByEnumeration(lp, y);
      const double got = CtcLogProb(lp, y);
      if (std::isinf(expected)) {
        CHECK(got == kCtcUnreachable);
      } else {
        CHECK(std::abs(got - expected) < 1e-10);
      }
    }
  }
}

TEST_CASE("brute force refuses large instances") {
  const Tensor lp = Uniform(11, 4);  // 4^11 > 10^6
  CHECK_THROWS_AS(CtcBruteForce(lp, std::vector<int>{0}), SizeError);
}

TEST_CASE("ctc gradient rows sum to zero") {
  std::mt19937_64 rng(11);
  const Tensor lp = testing::RandomLogProbs(4, 4, rng);
  const Tensor g = CtcGrad(lp, std::vector<int>{0, 1, 2});
  for (std::size_t t = 0; t < 4; ++t) {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += g.at(t, k);
    CHECK(std::abs(s) < 1e-12);
  }
}

TEST_CASE("single frame gradient pushes towards the target") {
  const Tensor lp = Uniform(1, 3);
  const Tensor g = CtcGrad(lp, std::vector<int>{1});
  CHECK(g.at(0, 1) > 0.0);
  CHECK(g.at(0, 0) < 0.0);
  CHECK(g.at(0, 2) < 0.0);
}

TEST_CASE("ctc gradient of unreachable target is a contract error") {
  CHECK_THROWS_AS(CtcGrad(Uniform(1, 3), std::vector<int>{0, 1}), ContractError);
}

TEST_CASE("taped ctc matches the plain value and occupancy gradient") {
  std::mt19937_64 rng(12);
  const Tensor lp = testing::RandomLogProbs(5, 4, rng);
  const std::vector<int> y = {2, 0, 2};
  Tape tape;
  const Var x = tape.Leaf(lp);
  const Var l = CtcLogProb(x, y);
  CHECK(l.item() == CtcLogProb(lp, y));
  tape.Backward(l);
  const Tensor g = tape.Grad(x);
  const Tensor occ = CtcOccupancy(lp, y);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g[i] - occ[i]) < 1e-12);
}

TEST_CASE("ctc through log_softmax passes grad check on a 4-frame 3-phone instance") {
  std::mt19937_64 rng(13);
  const std::vector<Tensor> inputs = {testing::RandomTensor({4, 4}, rng)};
  const std::vector<int> y = {0, 2, 1};
  const double err = GradCheck(
      [&](Tape&, std::span<const Var> in) { return CtcLogProb(LogSoftmax(in[0], 1), y); }, inputs);
  CHECK(err < 1e-4);
}

TEST_CASE("unreachable taped target records the sentinel without gradient") {
  Tape tape;
  const Var x = tape.Leaf(Uniform(1, 3));
  const Var l = CtcLogProb(x, std::vector<int>{0, 1});
  CHECK(l.item() == kCtcUnreachable);
  tape.Backward(l);
  const Tensor g = tape.Grad(x);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == 0.0);
}

}  // namespace mdd
