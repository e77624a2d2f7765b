// src/acoustic_model.cc

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

#include "mdd/acoustic_model.h"

#include <random>
#include <string>
#include <vector>

#include "mdd/error.h"

namespace mdd {

namespace {

// h' = h + z * (c - h), z and r from one sigmoid block, c from tanh over
// [x, r * h].
Var GruCell(Var x, Var h, Var gate_w, Var gate_b, Var cand_w, Var cand_b, std::size_t hidden) {
  Var gates = Sigmoid(Affine(Concat({x, h}, 1), gate_w, gate_b));
  Var update = Slice(gates, 1, 0, hidden);
  Var reset = Slice(gates, 1, hidden, 2 * hidden);
  Var cand = Tanh(Affine(Concat({x, Mul(reset, h)}, 1), cand_w, cand_b));
  return Add(h, Mul(update, Sub(cand, h)));
}

void CheckPhone(const ModelConfig& config, int y, const char* where) {
  if (y < 0 || y >= config.boundary_symbol())
    throw ContractError(std::string(where) + ": index " + std::to_string(y) +
                        " is not a phone (blank/eos are not allowed)");
}

}  // namespace

void ModelConfig::Validate() const {
  if (feature_dim < 1 || encoder_hidden < 1 || decoder_hidden < 1 || attention_dim < 1)
    throw ConfigError("model config: all extents must be >= 1");
  if (downsample_stride != 1 && downsample_stride != 2)
    throw ConfigError("model config: downsample_stride must be 1 or 2");
  if (output_size < 2)
    throw ConfigError("model config: output_size must cover at least one phone and eos");
}

ModelConfig MakeModelConfig(const PhoneInventory& inventory, int feature_dim,
                            std::uint64_t seed) {
  ModelConfig c;
  c.feature_dim = feature_dim;
  c.output_size = inventory.output_size();
  c.seed = seed;
  return c;
}

const char* ParamName(ParamId id) {
  static constexpr const char* kNames[kNumParams] = {
      "encoder.gate.weight",   "encoder.gate.bias",    "encoder.cand.weight",
      "encoder.cand.bias",     "ctc.weight",           "ctc.bias",
      "attention.key.weight",  "attention.query.weight", "attention.bias",
      "attention.score",       "decoder.embedding",    "decoder.gate.weight",
      "decoder.gate.bias",     "decoder.cand.weight",  "decoder.cand.bias",
      "output.weight",         "output.bias"};
  return kNames[static_cast<std::size_t>(id)];
}

Tensor::Shape ParamShape(const ModelConfig& c, ParamId id) {
  const std::size_t din = c.encoder_input_dim(), he = c.encoder_hidden, hd = c.decoder_hidden,
                    a = c.attention_dim, v = c.output_size, e = c.embedding_dim();
  switch (id) {
    case ParamId::kEncGateW: return {din + he, 2 * he};
    case ParamId::kEncGateB: return {2 * he};
    case ParamId::kEncCandW: return {din + he, he};
    case ParamId::kEncCandB: return {he};
    case ParamId::kCtcW: return {he, v};
    case ParamId::kCtcB: return {v};
    case ParamId::kAttKeyW: return {he, a};
    case ParamId::kAttQueryW: return {hd, a};
    case ParamId::kAttBias: return {a};
    case ParamId::kAttScore: return {a, 1};
    case ParamId::kEmbedding: return {v, e};
    case ParamId::kDecGateW: return {e + he + hd, 2 * hd};
    case ParamId::kDecGateB: return {2 * hd};
    case ParamId::kDecCandW: return {e + he + hd, hd};
    case ParamId::kDecCandB: return {hd};
    case ParamId::kOutW: return {hd + he, v};
    case ParamId::kOutB: return {v};
  }
  throw ContractError("ParamShape: unknown parameter id");
}

ModelParams ModelParams::Zeros(const ModelConfig& config) {
  config.Validate();
  ModelParams p;
  p.config = config;
  for (std::size_t i = 0; i < kNumParams; ++i)
    p.tensors[i] = Tensor(ParamShape(config, static_cast<ParamId>(i)), 0.0);
  return p;
}

ModelParams ModelParams::Init(const ModelConfig& config) {
  ModelParams p = Zeros(config);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (Tensor& t : p.tensors)
    for (double& v : t.values()) v = dist(rng);
  return p;
}

std::size_t ModelParams::NumValues() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors) n += t.size();
  return n;
}

bool ModelParams::AllFinite() const {
  for (const Tensor& t : tensors)
    if (!t.AllFinite()) return false;
  return true;
}

BoundModel BoundModel::Bind(Tape& tape, const ModelParams& params, bool requires_grad) {
  BoundModel m;
  m.config = &params.config;
  for (std::size_t i = 0; i < kNumParams; ++i)
    m.vars[i] = tape.Borrow(params.tensors[i], requires_grad);
  return m;
}

BoundModel BoundModel::FromVars(const ModelConfig& config, std::span<const Var> vars) {
  if (vars.size() != kNumParams)
    throw ContractError("BoundModel::FromVars: expected " + std::to_string(kNumParams) +
                        " tensors, got " + std::to_string(vars.size()));
  BoundModel m;
  m.config = &config;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (vars[i].value().shape() != ParamShape(config, static_cast<ParamId>(i)))
      throw DimensionError(std::string("BoundModel::FromVars: bad shape for ") +
                           ParamName(static_cast<ParamId>(i)));
    m.vars[i] = vars[i];
  }
  return m;
}

EncodedGraph Encode(const BoundModel& model, const FeatureMatrix& features) {
  const ModelConfig& c = *model.config;
  if (features.rank() != 2 || features.dim(1) != static_cast<std::size_t>(c.feature_dim))
    throw ConfigError("Encode: features of shape " + ShapeString(features.shape()) +
                      " do not match feature_dim " + std::to_string(c.feature_dim));
  if (features.dim(0) < 1) throw ConfigError("Encode: utterance has no frames");
  Tape& tape = model.tape();
  const std::size_t d = features.dim(1);
  const std::size_t stride = static_cast<std::size_t>(c.downsample_stride);
  const std::size_t out_len = static_cast<std::size_t>(c.EncodedLength(static_cast<int>(features.dim(0))));
  const std::size_t he = static_cast<std::size_t>(c.encoder_hidden);

  Var h = tape.Constant(Tensor({1, he}, 0.0));
  std::vector<Var> states;
  states.reserve(out_len);
  for (std::size_t t = 0; t < out_len; ++t) {
    // Stack `stride` consecutive frames; a missing trailing frame is zero.
    Tensor x({1, stride * d}, 0.0);
    for (std::size_t k = 0; k < stride; ++k) {
      const std::size_t frame = t * stride + k;
      if (frame >= features.dim(0)) break;
      std::copy_n(features.data() + frame * d, d, x.data() + k * d);
    }
    h = GruCell(tape.Constant(std::move(x)), h, model[ParamId::kEncGateW],
                model[ParamId::kEncGateB], model[ParamId::kEncCandW], model[ParamId::kEncCandB],
                he);
    states.push_back(h);
  }
  EncodedGraph g;
  g.states = Concat(states, 0);
  g.ctc_log_probs =
      LogSoftmax(Affine(g.states, model[ParamId::kCtcW], model[ParamId::kCtcB]), 1);
  g.attention_keys = MatMul(g.states, model[ParamId::kAttKeyW]);
  return g;
}

EncoderOutput Encode(const ModelParams& params, const FeatureMatrix& features) {
  Tape tape;
  const BoundModel model = BoundModel::Bind(tape, params, false);
  const EncodedGraph g = Encode(model, features);
  return {g.states.value(), g.ctc_log_probs.value(), g.attention_keys.value()};
}

EncodedGraph BorrowEncoderOutput(Tape& tape, const EncoderOutput& enc) {
  return {tape.Borrow(enc.states), tape.Borrow(enc.ctc_log_probs),
          tape.Borrow(enc.attention_keys)};
}

Tensor InitialDecoderState(const ModelConfig& config) {
  return Tensor({1, static_cast<std::size_t>(config.decoder_hidden)}, 0.0);
}

DecoderStepGraph DecoderStep(const BoundModel& model, const EncodedGraph& enc, Var hidden,
                             int prev_phone) {
  const ModelConfig& c = *model.config;
  if (prev_phone < 0 || prev_phone > c.boundary_symbol())
    throw ContractError("DecoderStep: previous symbol " + std::to_string(prev_phone) +
                        " out of range");
  const std::size_t len = static_cast<std::size_t>(enc.length());
  Var query = Affine(hidden, model[ParamId::kAttQueryW], model[ParamId::kAttBias]);
  Var scores = MatMul(Tanh(AddBias(enc.attention_keys, query)), model[ParamId::kAttScore]);
  Var weights = Softmax(Reshape(scores, {1, len}), 1);
  Var context = MatMul(weights, enc.states);
  Var embedded = Embed(model[ParamId::kEmbedding], prev_phone);
  Var next = GruCell(Concat({embedded, context}, 1), hidden, model[ParamId::kDecGateW],
                     model[ParamId::kDecGateB], model[ParamId::kDecCandW],
                     model[ParamId::kDecCandB], static_cast<std::size_t>(c.decoder_hidden));
  Var logits = Affine(Concat({next, context}, 1), model[ParamId::kOutW], model[ParamId::kOutB]);
  return {next, LogSoftmax(logits, 1), weights};
}

DecoderStepResult DecoderStep(const ModelParams& params, const EncoderOutput& enc,
                              const Tensor& hidden, int prev_phone) {
  Tape tape;
  const BoundModel model = BoundModel::Bind(tape, params, false);
  const EncodedGraph g = BorrowEncoderOutput(tape, enc);
  const DecoderStepGraph step = DecoderStep(model, g, tape.Borrow(hidden), prev_phone);
  return {step.hidden.value(), step.log_probs.value(), step.attention.value()};
}

Var AttLogProb(const BoundModel& model, const EncodedGraph& enc, std::span<const int> y) {
  const ModelConfig& c = *model.config;
  for (int p : y) CheckPhone(c, p, "AttLogProb");
  Tape& tape = model.tape();
  const int eos = c.boundary_symbol();
  Var hidden = tape.Constant(InitialDecoderState(c));
  int prev = eos;
  Var total;
  for (std::size_t l = 0; l <= y.size(); ++l) {
    const int target = l < y.size() ? y[l] : eos;
    DecoderStepGraph step = DecoderStep(model, enc, hidden, prev);
    Var term = Pick(step.log_probs, static_cast<std::size_t>(target));
    total = total.valid() ? Add(total, term) : term;
    hidden = step.hidden;
    prev = target;
  }
  return total;
}

double AttLogProb(const ModelParams& params, const EncoderOutput& enc, std::span<const int> y) {
  Tape tape;
  const BoundModel model = BoundModel::Bind(tape, params, false);
  return AttLogProb(model, BorrowEncoderOutput(tape, enc), y).item();
}

}  // namespace mdd
