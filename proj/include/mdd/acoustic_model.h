// mdd/acoustic_model.h

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

#ifndef MDD_ACOUSTIC_MODEL_H_
#define MDD_ACOUSTIC_MODEL_H_

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "mdd/phone_inventory.h"
#include "mdd/tape.h"
#include "mdd/tensor.h"

namespace mdd {

struct ModelConfig {
  int feature_dim = 16;
  int encoder_hidden = 32;
  int decoder_hidden = 32;
  int attention_dim = 32;
  int downsample_stride = 2;
  /// Width of both output heads: phones + unk + one slot (blank on the CTC
  /// head, eos on the attention head).
  int output_size = 0;
  std::uint64_t seed = 1;

  void Validate() const;
  int encoder_input_dim() const { return feature_dim * downsample_stride; }
  int embedding_dim() const { return decoder_hidden; }
  /// Index used for blank, eos and the start-of-sequence decoder input.
  int boundary_symbol() const { return output_size - 1; }
  /// Encoder length T' = ceil(T / stride).
  int EncodedLength(int num_frames) const {
    return (num_frames + downsample_stride - 1) / downsample_stride;
  }
  bool operator==(const ModelConfig&) const = default;
};

ModelConfig MakeModelConfig(const PhoneInventory& inventory, int feature_dim,
                            std::uint64_t seed = 1);

enum class ParamId : int {
  kEncGateW,
  kEncGateB,
  kEncCandW,
  kEncCandB,
  kCtcW,
  kCtcB,
  kAttKeyW,
  kAttQueryW,
  kAttBias,
  kAttScore,
  kEmbedding,
  kDecGateW,
  kDecGateB,
  kDecCandW,
  kDecCandB,
  kOutW,
  kOutB,
};
inline constexpr std::size_t kNumParams = 17;

const char* ParamName(ParamId id);
Tensor::Shape ParamShape(const ModelConfig& config, ParamId id);

/// All trainable tensors, in ParamId order.
struct ModelParams {
  ModelConfig config;
  std::array<Tensor, kNumParams> tensors;

  static ModelParams Zeros(const ModelConfig& config);
  /// Uniform in [-0.1, 0.1], drawn from config.seed in ParamId order.
  static ModelParams Init(const ModelConfig& config);

  Tensor& operator[](ParamId id) { return tensors[static_cast<std::size_t>(id)]; }
  const Tensor& operator[](ParamId id) const { return tensors[static_cast<std::size_t>(id)]; }
  std::size_t NumValues() const;
  bool AllFinite() const;
  bool operator==(const ModelParams&) const = default;
};

/// Parameters recorded on a tape.
struct BoundModel {
  const ModelConfig* config = nullptr;
  std::array<Var, kNumParams> vars;

  Var operator[](ParamId id) const { return vars[static_cast<std::size_t>(id)]; }
  Tape& tape() const { return *vars[0].tape(); }

  static BoundModel Bind(Tape& tape, const ModelParams& params, bool requires_grad);
  /// Adopts leaves created elsewhere (e.g. by GradCheck), in ParamId order.
  static BoundModel FromVars(const ModelConfig& config, std::span<const Var> vars);
};

struct EncoderOutput {
  Tensor states;          // T' x encoder_hidden
  Tensor ctc_log_probs;   // T' x output_size
  Tensor attention_keys;  // T' x attention_dim, states projected for attention

  int length() const { return static_cast<int>(states.dim(0)); }
};

struct EncodedGraph {
  Var states;
  Var ctc_log_probs;
  Var attention_keys;

  int length() const { return static_cast<int>(states.value().dim(0)); }
};

/// Runs the recurrent encoder and the CTC head on the tape. Throws
/// ConfigError if the feature dimension disagrees with the config.
EncodedGraph Encode(const BoundModel& model, const FeatureMatrix& features);
EncoderOutput Encode(const ModelParams& params, const FeatureMatrix& features);
/// Records an already computed encoder output as constants.
EncodedGraph BorrowEncoderOutput(Tape& tape, const EncoderOutput& enc);

struct DecoderStepGraph {
  Var hidden;     // 1 x decoder_hidden
  Var log_probs;  // 1 x output_size, eos last
  Var attention;  // 1 x T'
};

struct DecoderStepResult {
  Tensor hidden;
  Tensor log_probs;
  Tensor attention;
};

Tensor InitialDecoderState(const ModelConfig& config);

/// One autoregressive step. prev_phone is a phone index, or
/// config.boundary_symbol() as the start-of-sequence input.
DecoderStepGraph DecoderStep(const BoundModel& model, const EncodedGraph& enc, Var hidden,
                             int prev_phone);
DecoderStepResult DecoderStep(const ModelParams& params, const EncoderOutput& enc,
                              const Tensor& hidden, int prev_phone);

/// log P_ATT(y|X) with teacher forcing on y, including the final eos step.
Var AttLogProb(const BoundModel& model, const EncodedGraph& enc, std::span<const int> y);
double AttLogProb(const ModelParams& params, const EncoderOutput& enc, std::span<const int> y);

}  // namespace mdd

#endif  // MDD_ACOUSTIC_MODEL_H_
