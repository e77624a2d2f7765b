// tests/acceptance/acceptance.cc

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

// Acceptance checks. Each criterion prints one PASS/FAIL line with the
// measured value, its tolerance and the wall-clock time against its limit.
//
//   mdd-acceptance [--list] [--out DIR] [criterion ...]
//
// With no criterion names every criterion runs. Exit status is 0 only when
// every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdd/acoustic_model.h"
#include "mdd/commands.h"
#include "mdd/config_json.h"
#include "mdd/corpus.h"
#include "mdd/ctc.h"
#include "mdd/error.h"
#include "mdd/mdd_metrics.h"
#include "mdd/mfc_loss.h"
#include "mdd/nbest.h"
#include "mdd/report.h"
#include "mdd/tape.h"
#include "mdd/text_io.h"
#include "mdd/trainer.h"
#include "oracles/oracles.h"
#include "test_util.h"

namespace mdd {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string out_dir;
};

struct Criterion {
  std::string name;
  double limit_seconds;  // <= 0: no limit
  std::function<Outcome(Context&)> run;
};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// F1 from recall/precision pairs.

Outcome MetricArithmetic(Context&) {
  struct Row {
    int re, pr;  // in hundredths of a percent
    double f1;
  };
  const Row rows[] = {{5288, 3542, 42.42}, {7691, 3221, 45.41},
                      {7220, 3375, 46.00}, {7176, 3596, 47.91}};
  double worst = 0.0;
  bool ok = true;
  for (const Row& r : rows) {
    MddCounts c;
    const std::int64_t R = r.re, P = r.pr;
    c.tn = R * P;
    c.fp = 10000 * P - R * P;
    c.fn = 10000 * R - R * P;
    const MddCounts all[] = {c};
    const MetricReport m = CorpusMetrics(all);
    if (!m.f1 || !m.recall || !m.precision) return {false, "undefined metric"};
    ok = ok && std::abs(*m.recall * 10000 - r.re) < 1e-6 && std::abs(*m.precision * 10000 - r.pr) < 1e-6;
    worst = std::max(worst, std::abs(*m.f1 * 100.0 - r.f1));
  }
  ok = ok && worst <= 0.01;
  return {ok, "max |F1 - printed| = " + Num(worst) + " (tol 0.01) over 4 rows"};
}

// ---------------------------------------------------------------------------
// CTC against enumeration.

Outcome CtcOracle(Context&) {
  std::mt19937_64 rng(101);
  int instances = 0;
  double worst = 0.0;
  bool reach_ok = true;
  for (int T = 1; T <= 5; ++T) {
    for (int V = 1; V <= 3; ++V) {
      for (int draw = 0; draw < 4; ++draw) {
        const Tensor lp = testing::RandomLogProbs(T, V + 1, rng, 2.0);
        for (const auto& y : oracle::AllSequences(V, T)) {
          const double fast = CtcLogProb(lp, y);
          const double brute = CtcBruteForce(lp, y);
          const double enumerated = oracle::CtcLogProbByEnumeration(lp, y);
          ++instances;
          if (std::isinf(enumerated)) {
            reach_ok = reach_ok && fast == kCtcUnreachable && !(brute > kCtcUnreachable);
            continue;
          }
          worst = std::max({worst, std::abs(fast - brute), std::abs(fast - enumerated)});
        }
      }
    }
  }
  const bool ok = reach_ok && worst <= 1e-10 && instances >= 200;
  return {ok, "max |fast - brute force| = " + Num(worst) + " (tol 1e-10), " +
                  std::to_string(instances) + " instances" +
                  (reach_ok ? "" : ", unreachable targets disagree")};
}

Outcome CtcNormalization(Context&) {
  std::mt19937_64 rng(202);
  double worst = 0.0;
  int lattices = 0;
  for (int T = 1; T <= 4; ++T) {
    for (int V = 1; V <= 2; ++V) {
      for (int draw = 0; draw < 10; ++draw) {
        const Tensor lp = testing::RandomLogProbs(T, V + 1, rng, 2.0);
        double total = 0.0;
        for (const auto& y : oracle::AllSequences(V, T)) {
          const double l = CtcLogProb(lp, y);
          if (l > kCtcUnreachable) total += std::exp(l);
        }
        worst = std::max(worst, std::abs(total - 1.0));
        ++lattices;
      }
    }
  }
  return {worst <= 1e-9, "max |sum P - 1| = " + Num(worst) + " (tol 1e-9), " +
                             std::to_string(lattices) + " distributions"};
}

// ---------------------------------------------------------------------------
// Gradient suite.

struct GradInstance {
  std::vector<Tensor> inputs;
  ScalarFunction f;
};
using InstanceMaker = std::function<GradInstance(std::mt19937_64&)>;

// Fixed random weights turn a tensor output into a scalar without letting
// errors in different coordinates cancel.
Var WeightedSum(Var out, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Tensor w = testing::RandomTensor(out.value().shape(), rng);
  return Sum(Mul(out, out.tape()->Constant(std::move(w))));
}

int Dim(std::mt19937_64& rng, int lo = 1, int hi = 4) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

Tensor Rand(std::mt19937_64& rng, Tensor::Shape shape) {
  return testing::RandomTensor(shape, rng);
}

std::vector<std::pair<std::string, InstanceMaker>> PrimitiveMakers() {
  using S = std::size_t;
  std::vector<std::pair<std::string, InstanceMaker>> m;
  auto unary = [&](std::string name, std::function<Var(Var)> op) {
    m.emplace_back(name, [op](std::mt19937_64& rng) {
      const S n = Dim(rng), k = Dim(rng);
      const std::uint64_t seed = rng();
      return GradInstance{{Rand(rng, {n, k})}, [op, seed](Tape&, std::span<const Var> in) {
                            return WeightedSum(op(in[0]), seed);
                          }};
    });
  };
  auto binary = [&](std::string name, std::function<Var(Var, Var)> op) {
    m.emplace_back(name, [op](std::mt19937_64& rng) {
      const S n = Dim(rng), k = Dim(rng);
      const std::uint64_t seed = rng();
      return GradInstance{{Rand(rng, {n, k}), Rand(rng, {n, k})},
                          [op, seed](Tape&, std::span<const Var> in) {
                            return WeightedSum(op(in[0], in[1]), seed);
                          }};
    });
  };
  m.emplace_back("Affine", [](std::mt19937_64& rng) {
    const S n = Dim(rng), k = Dim(rng), c = Dim(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {n, k}), Rand(rng, {k, c}), Rand(rng, {c})},
                        [seed](Tape&, std::span<const Var> in) {
                          return WeightedSum(Affine(in[0], in[1], in[2]), seed);
                        }};
  });
  m.emplace_back("MatMul", [](std::mt19937_64& rng) {
    const S n = Dim(rng), k = Dim(rng), c = Dim(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {n, k}), Rand(rng, {k, c})},
                        [seed](Tape&, std::span<const Var> in) {
                          return WeightedSum(MatMul(in[0], in[1]), seed);
                        }};
  });
  m.emplace_back("AddBias", [](std::mt19937_64& rng) {
    const S n = Dim(rng), c = Dim(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {n, c}), Rand(rng, {c})},
                        [seed](Tape&, std::span<const Var> in) {
                          return WeightedSum(AddBias(in[0], in[1]), seed);
                        }};
  });
  unary("Tanh", [](Var x) { return Tanh(x); });
  unary("Sigmoid", [](Var x) { return Sigmoid(x); });
  unary("Softmax.0", [](Var x) { return Softmax(x, 0); });
  unary("Softmax.1", [](Var x) { return Softmax(x, 1); });
  unary("LogSoftmax.0", [](Var x) { return LogSoftmax(x, 0); });
  unary("LogSoftmax.1", [](Var x) { return LogSoftmax(x, 1); });
  unary("LogSumExp.0", [](Var x) { return LogSumExp(x, 0); });
  unary("LogSumExp.1", [](Var x) { return LogSumExp(x, 1); });
  unary("Scale", [](Var x) { return Scale(x, -1.7); });
  unary("Sum", [](Var x) { return Sum(x); });
  unary("Mean", [](Var x) { return Mean(x); });
  binary("Add", [](Var a, Var b) { return Add(a, b); });
  binary("Sub", [](Var a, Var b) { return Sub(a, b); });
  binary("Mul", [](Var a, Var b) { return Mul(a, b); });
  for (int axis = 0; axis < 2; ++axis) {
    m.emplace_back("Concat." + std::to_string(axis), [axis](std::mt19937_64& rng) {
      const int parts = Dim(rng, 2, 3);
      const S shared = Dim(rng);
      GradInstance g;
      for (int p = 0; p < parts; ++p) {
        const S own = Dim(rng);
        g.inputs.push_back(Rand(rng, axis == 0 ? Tensor::Shape{own, shared}
                                               : Tensor::Shape{shared, own}));
      }
      const std::uint64_t seed = rng();
      g.f = [axis, seed](Tape&, std::span<const Var> in) {
        return WeightedSum(Concat(in, axis), seed);
      };
      return g;
    });
    m.emplace_back("Slice." + std::to_string(axis), [axis](std::mt19937_64& rng) {
      const S n = Dim(rng, 2, 5), k = Dim(rng, 2, 5);
      const S extent = axis == 0 ? n : k;
      const S begin = std::uniform_int_distribution<S>(0, extent - 1)(rng);
      const S end = std::uniform_int_distribution<S>(begin + 1, extent)(rng);
      const std::uint64_t seed = rng();
      return GradInstance{{Rand(rng, {n, k})}, [=](Tape&, std::span<const Var> in) {
                            return WeightedSum(Slice(in[0], axis, begin, end), seed);
                          }};
    });
  }
  m.emplace_back("Embed", [](std::mt19937_64& rng) {
    const S v = Dim(rng, 2, 5), e = Dim(rng);
    const int index = std::uniform_int_distribution<int>(0, static_cast<int>(v) - 1)(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {v, e})}, [=](Tape&, std::span<const Var> in) {
                          return WeightedSum(Embed(in[0], index), seed);
                        }};
  });
  m.emplace_back("Pick", [](std::mt19937_64& rng) {
    const S n = Dim(rng), k = Dim(rng);
    const S index = std::uniform_int_distribution<S>(0, n * k - 1)(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {n, k})}, [=](Tape&, std::span<const Var> in) {
                          return WeightedSum(Pick(in[0], index), seed);
                        }};
  });
  m.emplace_back("Reshape", [](std::mt19937_64& rng) {
    const S n = Dim(rng), k = Dim(rng);
    const std::uint64_t seed = rng();
    return GradInstance{{Rand(rng, {n, k})}, [=](Tape&, std::span<const Var> in) {
                          return WeightedSum(Reshape(in[0], {k, n}), seed);
                        }};
  });
  return m;
}

// A reachable reference for a tiny model: L + adjacent repeats <= T'.
std::vector<int> ReachableSequence(std::mt19937_64& rng, int encoded_len, int labels) {
  while (true) {
    const int len = Dim(rng, 1, std::max(1, encoded_len - 1));
    std::vector<int> y = testing::RandomSequence(rng, len, labels);
    int need = len;
    for (std::size_t i = 1; i < y.size(); ++i) need += y[i] == y[i - 1];
    if (need <= encoded_len) return y;
  }
}

struct TinyProblem {
  ModelConfig config;
  ModelParams params;
  Utterance utt;
};

TinyProblem MakeTinyProblem(std::mt19937_64& rng) {
  TinyProblem p;
  p.config = testing::TinyConfig(3, rng(), 3);
  p.params = testing::RandomParams(p.config, rng, 0.5);
  const int frames = Dim(rng, 4, 8);
  const int enc_len = p.config.EncodedLength(frames);
  const std::vector<int> canonical = ReachableSequence(rng, enc_len, 3);
  const std::vector<int> reference = ReachableSequence(rng, enc_len, 3);
  p.utt = testing::MakeUtterance("u", testing::RandomTensor({static_cast<std::size_t>(frames), 2}, rng),
                                 canonical, reference);
  return p;
}

GradInstance ModelInstance(const TinyProblem& p,
                           std::function<Var(const BoundModel&, const EncodedGraph&)> loss) {
  GradInstance g;
  g.inputs.assign(p.params.tensors.begin(), p.params.tensors.end());
  const ModelConfig config = p.config;
  const Tensor features = p.utt.features;
  g.f = [config, features, loss](Tape&, std::span<const Var> in) {
    const BoundModel model = BoundModel::FromVars(config, in);
    const EncodedGraph enc = Encode(model, features);
    return loss(model, enc);
  };
  return g;
}

std::vector<std::pair<std::string, InstanceMaker>> ModelMakers() {
  std::vector<std::pair<std::string, InstanceMaker>> m;
  m.emplace_back("att_log_prob", [](std::mt19937_64& rng) {
    const TinyProblem p = MakeTinyProblem(rng);
    const std::vector<int> y = p.utt.reference->ids;
    return ModelInstance(p, [y](const BoundModel& model, const EncodedGraph& enc) {
      return AttLogProb(model, enc, y);
    });
  });
  m.emplace_back("ce_loss", [](std::mt19937_64& rng) {
    const TinyProblem p = MakeTinyProblem(rng);
    const Utterance utt = p.utt;
    return ModelInstance(p, [utt](const BoundModel& model, const EncodedGraph& enc) {
      return CeLoss(model, enc, utt, 0.3);
    });
  });
  m.emplace_back("mfc_loss", [](std::mt19937_64& rng) {
    // Redraw until the frozen list carries different F scores; otherwise the
    // loss is flat and the check says nothing.
    while (true) {
      const TinyProblem p = MakeTinyProblem(rng);
      SearchConfig search;
      search.beam_width = 4;
      search.m_best = 4;
      const HypothesisList hyps = BeamSearch(p.params, Encode(p.params, p.utt.features), search);
      const std::vector<double> f = HypothesisFScores(p.utt, hyps);
      if (std::adjacent_find(f.begin(), f.end(), std::not_equal_to<>()) == f.end()) continue;
      const Utterance utt = p.utt;
      return ModelInstance(p, [utt, hyps](const BoundModel& model, const EncodedGraph& enc) {
        return MfcLoss(model, enc, utt, hyps, 0.3);
      });
    }
  });
  return m;
}

Tensor LogSoftmaxRows(const Tensor& logits) {
  Tensor out = logits;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double mx = -INFINITY;
    for (std::size_t c = 0; c < out.cols(); ++c) mx = std::max(mx, out.at(r, c));
    double z = 0.0;
    for (std::size_t c = 0; c < out.cols(); ++c) z += std::exp(out.at(r, c) - mx);
    const double lz = mx + std::log(z);
    for (std::size_t c = 0; c < out.cols(); ++c) out.at(r, c) -= lz;
  }
  return out;
}

// CtcGrad against central differences of CtcLogProb through a log-softmax.
double CtcGradError(std::mt19937_64& rng) {
  const int T = Dim(rng, 2, 6), V = Dim(rng, 1, 4);
  const std::vector<int> y = ReachableSequence(rng, T, V);
  Tensor logits = testing::RandomTensor({static_cast<std::size_t>(T), static_cast<std::size_t>(V + 1)}, rng);
  const Tensor analytic = CtcGrad(LogSoftmaxRows(logits), y);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double saved = logits[i];
    logits[i] = saved + h;
    const double up = CtcLogProb(LogSoftmaxRows(logits), y);
    logits[i] = saved - h;
    const double down = CtcLogProb(LogSoftmaxRows(logits), y);
    logits[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double a = analytic[i];
    worst = std::max(worst, std::abs(a - numeric) /
                                std::max({std::abs(a), std::abs(numeric), 1e-8}));
  }
  return worst;
}

Outcome GradientSuite(Context&) {
  const int kInstances = 20;
  const double kTol = 1e-4;
  std::mt19937_64 rng(303);
  std::vector<std::pair<std::string, InstanceMaker>> makers = PrimitiveMakers();
  for (auto& mm : ModelMakers()) makers.push_back(std::move(mm));
  double worst = 0.0, worst_floored = 0.0;
  std::string worst_name;
  std::map<std::string, int> failing;  // family -> failing instances
  auto record = [&](const std::string& name, double err) {
    if (err > worst) worst = err, worst_name = name;
    if (!(err < kTol)) ++failing[name];
  };
  for (const auto& [name, make] : makers) {
    for (int i = 0; i < kInstances; ++i) {
      const GradInstance g = make(rng);
      const double err = GradCheck(g.f, g.inputs);
      record(name, err);
      // A double-valued loss limits central differences to about 1e-11
      // absolute; re-check failures with the denominator floored at 1e-6 to
      // tell rounding noise on tiny gradients from wrong gradients.
      if (!(err < kTol))
        worst_floored = std::max(worst_floored, GradCheckDetailed(g.f, g.inputs, 1e-5, 1e-6).max_relative_error);
    }
  }
  for (int i = 0; i < kInstances; ++i) record("ctc_grad", CtcGradError(rng));
  std::string detail = "max rel error " + Num(worst) + " (" + worst_name + ", tol 1e-4), " +
                       std::to_string(makers.size() + 1) + " functions x " +
                       std::to_string(kInstances);
  for (const auto& [name, count] : failing)
    detail += "; " + name + " fails " + std::to_string(count) + "/" + std::to_string(kInstances);
  if (!failing.empty()) detail += "; failures re-checked with floor 1e-6: max " + Num(worst_floored);
  return {failing.empty(), detail};
}

// ---------------------------------------------------------------------------
// Expected-F1 loss closed form.

Outcome MfcClosedForm(Context&) {
  std::mt19937_64 rng(404);
  std::normal_distribution<double> normal(0.0, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> shift(-50.0, 50.0);
  double grad_err = 0.0, shift_err = 0.0, range_violation = 0.0;
  for (int inst = 0; inst < 500; ++inst) {
    const int M = Dim(rng, 1, 16);
    std::vector<double> s(M), f(M);
    for (int m = 0; m < M; ++m) {
      s[m] = normal(rng);
      const double r = unit(rng);
      f[m] = r < 0.1 ? 0.0 : r > 0.9 ? 1.0 : unit(rng);
    }
    auto evaluate = [&](double offset, std::vector<double>* grad) {
      Tape tape;
      std::vector<Var> vars;
      for (double v : s) vars.push_back(tape.Leaf(Tensor::Scalar(v + offset)));
      const Var loss = ExpectedF1Loss(vars, f);
      if (grad) {
        tape.Backward(loss);
        for (const Var& v : vars) grad->push_back(tape.Grad(v).item());
      }
      return loss.item();
    };
    std::vector<double> grad;
    const double loss = evaluate(0.0, &grad);
    const double mx = *std::max_element(s.begin(), s.end());
    double z = 0.0;
    for (double v : s) z += std::exp(v - mx);
    std::vector<double> p(M);
    double fbar = 0.0;
    for (int m = 0; m < M; ++m) p[m] = std::exp(s[m] - mx) / z, fbar += p[m] * f[m];
    for (int m = 0; m < M; ++m)
      grad_err = std::max(grad_err, std::abs(grad[m] - (-p[m] * (f[m] - fbar))));
    range_violation = std::max({range_violation, loss - 0.0, -1.0 - loss});
    shift_err = std::max(shift_err, std::abs(evaluate(shift(rng), nullptr) - loss));
  }
  // The same range holds on real hypothesis lists.
  for (int inst = 0; inst < 20; ++inst) {
    const TinyProblem p = MakeTinyProblem(rng);
    Tape tape;
    const BoundModel model = BoundModel::Bind(tape, p.params, false);
    LossConfig lc;
    lc.m_best = 4;
    lc.beam_width = 4;
    const UtteranceLoss ul = TotalLoss(model, p.params, p.utt, lc);
    const double l = ul.breakdown.mfc_loss;
    range_violation = std::max({range_violation, l - 0.0, -1.0 - l});
  }
  const bool ok = grad_err <= 1e-10 && shift_err <= 1e-12 && range_violation <= 0.0;
  return {ok, "max |grad - closed form| = " + Num(grad_err) + " (tol 1e-10), shift change " +
                  Num(shift_err) + " (tol 1e-12), range violation " + Num(std::max(range_violation, 0.0))};
}

// ---------------------------------------------------------------------------
// beta = 0 in the MFC stage follows the cross-entropy trajectory.

Outcome BetaZeroEquivalence(Context&) {
  const PhoneInventory inv = PhoneInventory::Default();
  GenConfig gen = L2Preset();
  gen.num_utterances = 24;
  const std::vector<Utterance> train = Generate(inv, gen).utterances;
  const ModelParams init = ModelParams::Init(MakeModelConfig(inv, gen.feature_dim, 5));

  TrainConfig ce = TrainConfig::ForStage(Stage::kFinetuneL2);
  ce.epochs = 2;
  ce.batch_size = 4;
  ce.seed = 9;
  TrainConfig mfc = TrainConfig::ForStage(Stage::kMfc);
  mfc.epochs = ce.epochs;
  mfc.batch_size = ce.batch_size;
  mfc.seed = ce.seed;
  mfc.learning_rate = ce.learning_rate;
  mfc.loss.beta = 0.0;

  auto trajectory = [&](const TrainConfig& c) {
    std::vector<ModelParams> steps;
    TrainStage(init, train, {}, c, [&](const StepInfo& s) { steps.push_back(*s.params); });
    return steps;
  };
  const std::vector<ModelParams> a = trajectory(ce);
  const std::vector<ModelParams> b = trajectory(mfc);
  if (a.size() != b.size() || a.empty()) return {false, "step counts differ"};
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s)
    for (std::size_t t = 0; t < kNumParams; ++t)
      for (std::size_t i = 0; i < a[s].tensors[t].size(); ++i)
        worst = std::max(worst, std::abs(a[s].tensors[t][i] - b[s].tensors[t][i]));
  return {worst <= 1e-10, "max |param difference| = " + Num(worst) + " over " +
                              std::to_string(a.size()) + " steps (tol 1e-10)"};
}

// ---------------------------------------------------------------------------
// Alignment against breadth-first edit-script search.

Outcome AlignmentOracle(Context&) {
  const int kAlphabet = 3, kMaxLen = 6;
  const oracle::EditScriptSearch search(kAlphabet, kMaxLen);
  const auto strings = oracle::AllSequences(kAlphabet, kMaxLen);
  std::int64_t pairs = 0, wrong_cost = 0, bad_trace = 0, wrong_distance = 0;
  for (const auto& a : strings) {
    const auto dist = search.DistancesFrom(a);
    for (const auto& b : strings) {
      const int expected = dist.at(search.Encode(b));
      const AlignmentTrace trace = Align(a, b);
      wrong_cost += trace.cost() != expected;
      wrong_distance += EditDistance(a, b) != expected;
      bad_trace += !oracle::TraceTransforms(trace, a, b);
      ++pairs;
    }
  }
  const bool ok = wrong_cost == 0 && bad_trace == 0 && wrong_distance == 0;
  return {ok, std::to_string(pairs) + " pairs; cost mismatches " + std::to_string(wrong_cost) +
                  ", distance mismatches " + std::to_string(wrong_distance) +
                  ", invalid traces " + std::to_string(bad_trace)};
}

// ---------------------------------------------------------------------------
// Wide beam search against exhaustive ranking.

Outcome NbestOracle(Context&) {
  std::mt19937_64 rng(505);
  int draws = 0, mismatched = 0;
  double worst_score = 0.0;
  for (int d = 0; d < 60; ++d) {
    const int V = 1 + d % 3;
    const int max_len = 1 + (d / 3) % 4;
    const ModelConfig config = testing::TinyConfig(V, rng(), 3);
    const ModelParams params = testing::RandomParams(config, rng, 1.0);
    const Tensor feats = testing::RandomTensor({8, 2}, rng);
    const EncoderOutput enc = Encode(params, feats);
    int candidates = 0;
    for (int l = 0, p = 1; l <= max_len; ++l, p *= V) candidates += p;
    SearchConfig sc;
    sc.beam_width = candidates;
    sc.m_best = candidates;
    sc.max_len = max_len;
    const HypothesisList beam = BeamSearch(params, enc, sc);
    const HypothesisList exhaustive = ExhaustiveNbest(params, enc, sc);
    const std::vector<Hypothesis> ranked = oracle::RankAllSequences(params, enc, max_len, sc.alpha);
    bool same = beam.size() == exhaustive.size() && exhaustive.size() == ranked.size();
    for (std::size_t i = 0; same && i < beam.size(); ++i) {
      same = beam.hypotheses[i].phones.ids == exhaustive.hypotheses[i].phones.ids &&
             ranked[i].phones.ids == exhaustive.hypotheses[i].phones.ids;
      worst_score = std::max({worst_score,
                              std::abs(beam.hypotheses[i].joint_score - ranked[i].joint_score),
                              std::abs(exhaustive.hypotheses[i].joint_score - ranked[i].joint_score)});
    }
    mismatched += !same;
    ++draws;
  }
  const bool ok = mismatched == 0 && worst_score <= 1e-9;
  return {ok, std::to_string(draws) + " draws; list mismatches " + std::to_string(mismatched) +
                  ", max score difference " + Num(worst_score) + " (tol 1e-9)"};
}

// ---------------------------------------------------------------------------
// End-to-end runs on the shipped synthetic corpora and configs.

struct Corpora {
  CorpusSplit l1, l2;
};

Corpora BuildCorpora(const PhoneInventory& inv) {
  Corpora c;
  const GenOptions g1 = LoadGenOptions(ResolveConfigPath("gen_l1"));
  const GenOptions g2 = LoadGenOptions(ResolveConfigPath("gen_l2"));
  c.l1 = SplitCorpus(Generate(inv, g1.config).utterances, g1.split, g1.split_seed);
  c.l2 = SplitCorpus(Generate(inv, g2.config).utterances, g2.split, g2.split_seed);
  return c;
}

TrainConfig LoadTrainConfig(const std::string& name, std::uint64_t seed) {
  TrainConfig c = TrainConfigFromJson(LoadJsonFile(ResolveConfigPath(name)));
  c.seed = seed;
  return c;
}

Outcome EndToEnd(Context&) {
  const PhoneInventory inv = PhoneInventory::Default();
  const Corpora data = BuildCorpora(inv);
  SearchConfig search = SearchConfigFromJson(LoadJsonFile(ResolveConfigPath("search")));
  search.m_best = 1;
  const std::uint64_t seeds[] = {1, 2, 3};
  int wins = 0;
  double total_gain = 0.0;
  std::ostringstream detail;
  for (std::uint64_t seed : seeds) {
    const ModelParams init =
        ModelParams::Init(MakeModelConfig(inv, data.l2.train[0].feature_dim(), seed));
    const auto outcomes = RunPipeline(init, data.l1.train, data.l1.dev, data.l2.train, data.l2.dev,
                                      LoadTrainConfig("train_pretrain_l1", seed),
                                      LoadTrainConfig("train_finetune_l2", seed),
                                      LoadTrainConfig("train_mfc", seed));
    const CorpusEvaluation base = EvaluateCorpus(outcomes[1].result.best_params, data.l2.test, search);
    const CorpusEvaluation mfc = EvaluateCorpus(outcomes[2].result.best_params, data.l2.test, search);
    const double gain = mfc.mean_utterance_f1.value_or(0.0) - base.mean_utterance_f1.value_or(0.0);
    wins += gain > 0.0;
    total_gain += gain;
    detail << " seed " << seed << ": " << Num(base.mean_utterance_f1.value_or(NAN)) << " -> "
           << Num(mfc.mean_utterance_f1.value_or(NAN)) << ";";
    std::cerr << "  seed " << seed << " baseline utt-F1 " << FormatMetric(base.mean_utterance_f1)
              << " PER " << FormatMetric(base.report.per) << ", mfc utt-F1 "
              << FormatMetric(mfc.mean_utterance_f1) << " PER " << FormatMetric(mfc.report.per)
              << "\n";
  }
  const double mean_gain = total_gain / 3.0;
  const bool ok = wins >= 2 && mean_gain > 0.0;
  return {ok, "test mean utterance F1 improved in " + std::to_string(wins) +
                  "/3 seeds (need 2), mean gain " + Num(mean_gain) + " (need > 0);" + detail.str()};
}

Outcome SweepReproduction(Context& ctx) {
  const PhoneInventory inv = PhoneInventory::Default();
  const Corpora data = BuildCorpora(inv);
  const SweepSpec spec = LoadSweepSpec(ResolveConfigPath("sweep"));
  const std::uint64_t seed = 1;
  const ModelParams init =
      ModelParams::Init(MakeModelConfig(inv, data.l2.train[0].feature_dim(), seed));
  const auto outcomes = RunPipeline(init, data.l1.train, data.l1.dev, data.l2.train, data.l2.dev,
                                    LoadTrainConfig("train_pretrain_l1", seed),
                                    LoadTrainConfig("train_finetune_l2", seed), std::nullopt);
  SweepInputs inputs{outcomes[1].result.best_params, data.l2.train, data.l2.dev, data.l2.test};
  const std::string dir = ctx.out_dir + "/sweep";
  MakeDirectories(dir);
  const std::string csv = dir + "/sweep.csv";
  std::vector<SweepRow> written;
  RunSweep(spec, inputs, std::cerr, [&](const SweepRow& r) {
    written.push_back(r);
    WriteSweepCsv(csv, written);
  });
  const std::vector<SweepRow> rows = ReadSweepCsv(csv);
  WriteSweepReport(rows, dir + "/report");

  const std::size_t expected =
      spec.seeds.size() * (spec.m_best.size() * spec.beta.size() + (spec.include_baseline ? 1 : 0));
  int failed = 0, beta_zero = 0, beta_zero_mismatch = 0;
  std::set<std::tuple<std::uint64_t, int, double>> cells;
  std::map<std::uint64_t, SweepRow> baseline;
  for (const SweepRow& r : rows) {
    failed += r.status != "ok";
    if (r.kind == "baseline") baseline[r.seed] = r;
    else cells.insert({r.seed, r.m_best, r.beta});
  }
  for (const SweepRow& r : rows) {
    if (r.kind != "mfc" || r.beta != 0.0) continue;
    ++beta_zero;
    auto it = baseline.find(r.seed);
    const bool same = it != baseline.end() && r.per == it->second.per && r.f1 == it->second.f1 &&
                      r.dar == it->second.dar &&
                      r.mean_utterance_f1 == it->second.mean_utterance_f1;
    beta_zero_mismatch += !same;
  }
  const bool ok = rows.size() == expected && failed == 0 &&
                  cells.size() == spec.seeds.size() * spec.m_best.size() * spec.beta.size() &&
                  beta_zero > 0 && beta_zero_mismatch == 0;
  return {ok, std::to_string(rows.size()) + "/" + std::to_string(expected) + " rows, " +
                  std::to_string(failed) + " failed, beta=0 rows differing from baseline " +
                  std::to_string(beta_zero_mismatch) + "/" + std::to_string(beta_zero) +
                  "; csv " + csv};
}

// ---------------------------------------------------------------------------
// Exact unit values.

Outcome UnitValues(Context&) {
  MddCounts a;
  a.c_d = 3, a.c_h = 4, a.c_dh = 2;
  const bool f1_ok = UtteranceF1(a) == 4.0 / 7.0;
  MddCounts b;
  b.tn = 10, b.cd = 6, b.id = 4;
  const MddCounts bs[] = {b};
  const MetricReport r = CorpusMetrics(bs);
  const bool dar_ok = r.dar && *r.dar == 0.6;
  const bool empty_ok = UtteranceF1(MddCounts{}) == 1.0;
  return {f1_ok && dar_ok && empty_ok,
          std::string("utterance F1 (3,4,2) ") + (f1_ok ? "= 4/7" : "wrong") + ", DAR(6 of 10) " +
              (dar_ok ? "= 0.6" : "wrong") + ", empty " + (empty_ok ? "= 1" : "wrong")};
}

std::vector<Criterion> AllCriteria() {
  return {
      {"metric_arithmetic", 1, MetricArithmetic},
      {"ctc_oracle", 10, CtcOracle},
      {"ctc_normalization", 5, CtcNormalization},
      {"gradient_suite", 60, GradientSuite},
      {"mfc_closed_form", 0, MfcClosedForm},
      {"beta_zero_equivalence", 0, BetaZeroEquivalence},
      {"alignment_oracle", 30, AlignmentOracle},
      {"nbest_oracle", 0, NbestOracle},
      {"end_to_end", 600, EndToEnd},
      {"sweep", 2700, SweepReproduction},
      {"unit_values", 0, UnitValues},
  };
}

}  // namespace
}  // namespace mdd

int main(int argc, char** argv) {
  using namespace mdd;
  Context ctx;
  ctx.out_dir = (std::filesystem::temp_directory_path() / "mdd_acceptance").string();
  std::vector<std::string> selected;
  const std::vector<Criterion> all = AllCriteria();
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const Criterion& c : all) std::cout << c.name << "\n";
      return 0;
    } else if (arg == "--out" && i + 1 < argc) {
      ctx.out_dir = argv[++i];
    } else {
      selected.push_back(arg);
    }
  }
  for (const std::string& s : selected) {
    if (std::none_of(all.begin(), all.end(), [&](const Criterion& c) { return c.name == s; })) {
      std::cerr << "unknown criterion: " << s << "\n";
      return 2;
    }
  }
  MakeDirectories(ctx.out_dir);
  int failures = 0;
  for (const Criterion& c : all) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end())
      continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds <= 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    failures += !pass;
    char timing[96];
    if (c.limit_seconds > 0)
      std::snprintf(timing, sizeof(timing), "%.2fs (limit %gs)", secs, c.limit_seconds);
    else
      std::snprintf(timing, sizeof(timing), "%.2fs", secs);
    std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << " [" << timing
              << (in_time ? "" : ", over time limit") << "]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
