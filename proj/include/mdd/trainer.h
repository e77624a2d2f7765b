// mdd/trainer.h

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

#ifndef MDD_TRAINER_H_
#define MDD_TRAINER_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdd/acoustic_model.h"
#include "mdd/mdd_metrics.h"
#include "mdd/mfc_loss.h"
#include "mdd/nbest.h"
#include "mdd/text_io.h"

namespace mdd {

enum class Stage { kPretrainL1, kFinetuneL2, kMfc };

const char* StageName(Stage stage);  // "pretrain_l1", "finetune_l2", "mfc"
Stage ParseStage(const std::string& name);  // ConfigError on unknown names

/// Which epoch's parameters a stage hands on.
enum class Selection {
  kAuto,     // dev PER for cross-entropy stages, dev F1 for the MFC stage
  kDevPer,
  kDevF1,
  kFinal,
};
const char* SelectionName(Selection s);
Selection ParseSelection(const std::string& name);

struct TrainConfig {
  Stage stage = Stage::kPretrainL1;
  int epochs = 5;
  int batch_size = 8;
  double learning_rate = 1e-3;
  double grad_clip_norm = 5.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  LossConfig loss;
  std::uint64_t seed = 1;
  Selection selection = Selection::kAuto;
  /// Beam used for the per-epoch dev decode (top-1 only).
  int dev_beam_width = 4;

  /// Stage defaults: learning rate 1e-3 and beta = 0 for the cross-entropy
  /// stages, 1e-4 and beta = 0.9 for the MFC stage.
  static TrainConfig ForStage(Stage stage);

  /// Cross-entropy stages have beta forced to 0. Throws ConfigError.
  void Validate() const;
  bool IsCrossEntropy() const { return stage != Stage::kMfc; }
  Selection EffectiveSelection() const;
  SearchConfig DevSearch() const;
  bool operator==(const TrainConfig&) const = default;
};

struct AdamState {
  std::int64_t step = 0;
  std::vector<Tensor> m, v;  // one per parameter tensor, empty before the first step

  bool operator==(const AdamState&) const = default;
};

/// Rescales the gradients so their global L2 norm is at most max_norm.
/// Returns the norm before clipping.
double ClipGlobalNorm(std::vector<Tensor>* grads, double max_norm);

/// One bias-corrected adaptive-moment update.
void AdamUpdate(const TrainConfig& config, const std::vector<Tensor>& grads, AdamState* state,
                ModelParams* params);

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  std::optional<double> dev_per, dev_f1, dev_dar;
  std::optional<double> dev_mean_utterance_f1;
};

struct StepInfo {
  int epoch;
  int batch;
  double loss;
  double grad_norm;  // before clipping
  const ModelParams* params;  // after the update
};
using StepObserver = std::function<void(const StepInfo&)>;

/// Batch mean loss and parameter gradients, evaluated on one tape.
struct BatchGradient {
  double loss = 0.0;
  std::vector<Tensor> grads;
  std::vector<LossBreakdown> breakdowns;
};
BatchGradient ComputeBatchGradient(const ModelParams& params,
                                   const std::vector<const Utterance*>& batch,
                                   const TrainConfig& config);

/// Batches of utterances of similar length: sorted by (frames, id), cut into
/// batch_size chunks. The order of the batches is shuffled per epoch.
std::vector<std::vector<const Utterance*>> BucketBatches(const std::vector<Utterance>& corpus,
                                                         int batch_size);

struct TrainState {
  ModelParams params;
  AdamState adam;
  std::string rng_state;
  int epoch = 0;
};

struct TrainResult {
  TrainState final_state;
  ModelParams best_params;
  int best_epoch = 0;  // 0: the input parameters (no epoch improved on them or none ran)
  std::vector<EpochLog> log;
};

/// Runs `config.epochs` epochs on `train`. When `dev` is non-empty every
/// epoch is followed by a top-1 dev decode and the selection rule picks the
/// parameters returned in best_params. `resume` continues optimizer and RNG
/// state from an earlier run of the same stage.
TrainResult TrainStage(const ModelParams& params, const std::vector<Utterance>& train,
                       const std::vector<Utterance>& dev, const TrainConfig& config,
                       const StepObserver& observer = nullptr,
                       const TrainState* resume = nullptr);

struct CorpusEvaluation {
  MetricReport report;
  std::optional<double> mean_utterance_f1;  // undefined without references
  std::vector<std::string> ids;             // utterances that were scored
  std::vector<MddCounts> counts;            // parallel to ids
  std::vector<DecodedUtterance> decoded;
};

std::vector<DecodedUtterance> DecodeCorpus(const ModelParams& params,
                                           const std::vector<Utterance>& corpus,
                                           const SearchConfig& search);

/// Scores top-1 hypotheses against the corpus references. Utterances
/// without a reference or without a hypothesis are skipped.
CorpusEvaluation ScoreDecoded(const std::vector<Utterance>& corpus,
                              const std::vector<DecodedUtterance>& decoded);

CorpusEvaluation EvaluateCorpus(const ModelParams& params, const std::vector<Utterance>& corpus,
                                const SearchConfig& search);

struct StageOutcome {
  Stage stage;
  TrainResult result;
};

/// Pretrain on L1, fine-tune on L2, then the MFC stage on L2. Each stage
/// starts from the previous stage's selected parameters. An empty
/// `mfc` optional stops after fine-tuning.
std::vector<StageOutcome> RunPipeline(const ModelParams& init, const std::vector<Utterance>& l1_train,
                                      const std::vector<Utterance>& l1_dev,
                                      const std::vector<Utterance>& l2_train,
                                      const std::vector<Utterance>& l2_dev,
                                      const TrainConfig& pretrain, const TrainConfig& finetune,
                                      const std::optional<TrainConfig>& mfc);

}  // namespace mdd

#endif  // MDD_TRAINER_H_
