// src/trainer.cc

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

#include "mdd/trainer.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "mdd/error.h"

namespace mdd {

namespace {

std::string SaveRng(const std::mt19937_64& rng) {
  std::ostringstream ss;
  ss << rng;
  return ss.str();
}

std::mt19937_64 LoadRng(const std::string& state) {
  std::mt19937_64 rng;
  std::istringstream ss(state);
  ss >> rng;
  if (!ss) throw FormatError("corrupt RNG state");
  return rng;
}

template <typename T>
void ShuffleInPlace(std::vector<T>* v, std::mt19937_64* rng) {
  for (std::size_t i = v->size(); i > 1; --i) std::swap((*v)[i - 1], (*v)[(*rng)() % i]);
}

// Larger is better; undefined ranks below everything.
std::optional<double> SelectionKey(Selection s, const EpochLog& e) {
  switch (s) {
    case Selection::kDevPer:
      if (e.dev_per) return -*e.dev_per;
      return std::nullopt;
    case Selection::kDevF1:
      return e.dev_f1 ? e.dev_f1 : e.dev_mean_utterance_f1;
    default:
      return std::nullopt;
  }
}

std::string BatchIds(const std::vector<const Utterance*>& batch) {
  std::string s;
  for (const Utterance* u : batch) s += (s.empty() ? "" : ",") + u->id;
  return s;
}

}  // namespace

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kPretrainL1: return "pretrain_l1";
    case Stage::kFinetuneL2: return "finetune_l2";
    case Stage::kMfc: return "mfc";
  }
  return "?";
}

Stage ParseStage(const std::string& name) {
  for (Stage s : {Stage::kPretrainL1, Stage::kFinetuneL2, Stage::kMfc})
    if (name == StageName(s)) return s;
  throw ConfigError("unknown stage '" + name + "' (pretrain_l1, finetune_l2, mfc)");
}

const char* SelectionName(Selection s) {
  switch (s) {
    case Selection::kAuto: return "auto";
    case Selection::kDevPer: return "dev_per";
    case Selection::kDevF1: return "dev_f1";
    case Selection::kFinal: return "final";
  }
  return "?";
}

Selection ParseSelection(const std::string& name) {
  for (Selection s : {Selection::kAuto, Selection::kDevPer, Selection::kDevF1, Selection::kFinal})
    if (name == SelectionName(s)) return s;
  throw ConfigError("unknown selection rule '" + name + "'");
}

TrainConfig TrainConfig::ForStage(Stage stage) {
  TrainConfig c;
  c.stage = stage;
  if (stage == Stage::kMfc) {
    c.learning_rate = 1e-4;
    c.loss.beta = 0.9;
  } else {
    c.learning_rate = 1e-3;
    c.loss.beta = 0.0;
  }
  return c;
}

void TrainConfig::Validate() const {
  if (epochs < 0) throw ConfigError("train: epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train: learning_rate must be > 0");
  if (!(grad_clip_norm > 0.0)) throw ConfigError("train: grad_clip_norm must be > 0");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0))
    throw ConfigError("train: Adam decay rates must lie in [0, 1)");
  if (!(adam_epsilon > 0.0)) throw ConfigError("train: adam_epsilon must be > 0");
  if (dev_beam_width < 1) throw ConfigError("train: dev_beam_width must be >= 1");
  if (IsCrossEntropy() && loss.beta != 0.0)
    throw ConfigError(std::string("train: stage ") + StageName(stage) + " requires beta = 0");
  loss.Validate();
}

Selection TrainConfig::EffectiveSelection() const {
  if (selection != Selection::kAuto) return selection;
  return IsCrossEntropy() ? Selection::kDevPer : Selection::kDevF1;
}

SearchConfig TrainConfig::DevSearch() const {
  SearchConfig s;
  s.beam_width = dev_beam_width;
  s.m_best = 1;
  s.alpha = loss.alpha;
  s.max_len = loss.max_len;
  return s;
}

double ClipGlobalNorm(std::vector<Tensor>* grads, double max_norm) {
  double sq = 0.0;
  for (const Tensor& g : *grads)
    for (double x : g.storage()) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (Tensor& g : *grads)
      for (std::size_t i = 0; i < g.size(); ++i) g.data()[i] *= scale;
  }
  return norm;
}

void AdamUpdate(const TrainConfig& config, const std::vector<Tensor>& grads, AdamState* state,
                ModelParams* params) {
  if (grads.size() != kNumParams) throw DimensionError("AdamUpdate: wrong number of gradients");
  if (state->m.empty()) {
    for (std::size_t k = 0; k < kNumParams; ++k) {
      state->m.emplace_back(params->tensors[k].shape(), 0.0);
      state->v.emplace_back(params->tensors[k].shape(), 0.0);
    }
  }
  ++state->step;
  const double b1 = config.adam_beta1, b2 = config.adam_beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state->step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state->step));
  for (std::size_t k = 0; k < kNumParams; ++k) {
    double* w = params->tensors[k].data();
    double* m = state->m[k].data();
    double* v = state->v[k].data();
    const double* g = grads[k].data();
    for (std::size_t i = 0; i < grads[k].size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      w[i] -= config.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + config.adam_epsilon);
    }
  }
}

BatchGradient ComputeBatchGradient(const ModelParams& params,
                                   const std::vector<const Utterance*>& batch,
                                   const TrainConfig& config) {
  Tape tape;
  const BoundModel model = BoundModel::Bind(tape, params, true);
  BatchLoss bl = ComputeBatchLoss(
      model, params, batch, config.loss,
      config.IsCrossEntropy() ? Objective::kCrossEntropy : Objective::kInterpolated);
  tape.Backward(bl.loss);
  BatchGradient out;
  out.loss = bl.loss.item();
  out.breakdowns = std::move(bl.breakdowns);
  out.grads.reserve(kNumParams);
  for (const Var& v : model.vars) out.grads.push_back(tape.Grad(v));
  return out;
}

std::vector<std::vector<const Utterance*>> BucketBatches(const std::vector<Utterance>& corpus,
                                                         int batch_size) {
  std::vector<const Utterance*> order;
  order.reserve(corpus.size());
  for (const Utterance& u : corpus) order.push_back(&u);
  std::sort(order.begin(), order.end(), [](const Utterance* a, const Utterance* b) {
    if (a->num_frames() != b->num_frames()) return a->num_frames() < b->num_frames();
    return a->id < b->id;
  });
  std::vector<std::vector<const Utterance*>> batches;
  for (std::size_t i = 0; i < order.size(); i += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(batch_size));
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                         order.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return batches;
}

TrainResult TrainStage(const ModelParams& params, const std::vector<Utterance>& train,
                       const std::vector<Utterance>& dev, const TrainConfig& config,
                       const StepObserver& observer, const TrainState* resume) {
  config.Validate();
  if (train.empty()) throw ContractError("train: empty training corpus");
  for (const Utterance& u : train)
    if (!u.reference) throw ContractError("train: utterance '" + u.id + "' has no reference");

  TrainResult result;
  TrainState& st = result.final_state;
  std::mt19937_64 rng(config.seed);
  if (resume) {
    st = *resume;
    rng = LoadRng(resume->rng_state);
  } else {
    st.params = params;
  }
  result.best_params = st.params;

  const Selection selection = config.EffectiveSelection();
  std::optional<double> best_key;
  const auto buckets = BucketBatches(train, config.batch_size);

  for (int e = 0; e < config.epochs; ++e) {
    ++st.epoch;
    // Shuffle from the bucket order every epoch so a resumed run sees the
    // same batches as an uninterrupted one.
    auto batches = buckets;
    ShuffleInPlace(&batches, &rng);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
      BatchGradient g = ComputeBatchGradient(st.params, batches[b], config);
      bool finite = std::isfinite(g.loss);
      for (const Tensor& t : g.grads) finite = finite && t.AllFinite();
      if (!finite)
        throw NumericError("non-finite loss or gradient at epoch " + std::to_string(st.epoch) +
                           ", batch " + std::to_string(b) + " (utterances " +
                           BatchIds(batches[b]) + ")");
      const double norm = ClipGlobalNorm(&g.grads, config.grad_clip_norm);
      AdamUpdate(config, g.grads, &st.adam, &st.params);
      loss_sum += g.loss * static_cast<double>(batches[b].size());
      if (observer)
        observer({st.epoch, static_cast<int>(b), g.loss, norm, &st.params});
    }

    EpochLog log;
    log.epoch = st.epoch;
    log.train_loss = loss_sum / static_cast<double>(train.size());
    if (!dev.empty()) {
      const CorpusEvaluation ev = EvaluateCorpus(st.params, dev, config.DevSearch());
      log.dev_per = ev.report.per;
      log.dev_f1 = ev.report.f1;
      log.dev_dar = ev.report.dar;
      log.dev_mean_utterance_f1 = ev.mean_utterance_f1;
    }
    result.log.push_back(log);

    if (selection == Selection::kFinal || dev.empty()) {
      result.best_params = st.params;
      result.best_epoch = st.epoch;
    } else {
      const std::optional<double> key = SelectionKey(selection, log);
      // The first trained epoch always replaces the input parameters.
      if (result.best_epoch == 0 || (key && (!best_key || *key > *best_key))) {
        best_key = key;
        result.best_params = st.params;
        result.best_epoch = st.epoch;
      }
    }
  }
  st.rng_state = SaveRng(rng);
  return result;
}

std::vector<DecodedUtterance> DecodeCorpus(const ModelParams& params,
                                           const std::vector<Utterance>& corpus,
                                           const SearchConfig& search) {
  std::vector<DecodedUtterance> out;
  out.reserve(corpus.size());
  for (const Utterance& u : corpus) {
    const EncoderOutput enc = Encode(params, u.features);
    out.push_back({u.id, BeamSearch(params, enc, search)});
  }
  return out;
}

CorpusEvaluation ScoreDecoded(const std::vector<Utterance>& corpus,
                              const std::vector<DecodedUtterance>& decoded) {
  std::map<std::string, const DecodedUtterance*> by_id;
  for (const DecodedUtterance& d : decoded) by_id[d.id] = &d;
  CorpusEvaluation ev;
  double f1_sum = 0.0;
  for (const Utterance& u : corpus) {
    auto it = by_id.find(u.id);
    if (!u.reference || it == by_id.end() || it->second->hypotheses.empty()) continue;
    const MddCounts c = ComputeMddCounts(u.canonical.ids, u.reference->ids,
                                         it->second->hypotheses.hypotheses[0].phones.ids);
    f1_sum += UtteranceF1(c);
    ev.ids.push_back(u.id);
    ev.counts.push_back(c);
  }
  if (!ev.counts.empty()) {
    ev.report = CorpusMetrics(ev.counts);
    ev.mean_utterance_f1 = f1_sum / static_cast<double>(ev.counts.size());
  }
  ev.decoded = decoded;
  return ev;
}

CorpusEvaluation EvaluateCorpus(const ModelParams& params, const std::vector<Utterance>& corpus,
                                const SearchConfig& search) {
  return ScoreDecoded(corpus, DecodeCorpus(params, corpus, search));
}

std::vector<StageOutcome> RunPipeline(const ModelParams& init, const std::vector<Utterance>& l1_train,
                                      const std::vector<Utterance>& l1_dev,
                                      const std::vector<Utterance>& l2_train,
                                      const std::vector<Utterance>& l2_dev,
                                      const TrainConfig& pretrain, const TrainConfig& finetune,
                                      const std::optional<TrainConfig>& mfc) {
  if (pretrain.stage != Stage::kPretrainL1 || finetune.stage != Stage::kFinetuneL2 ||
      (mfc && mfc->stage != Stage::kMfc))
    throw ConfigError("pipeline: stages must be ordered pretrain_l1, finetune_l2, mfc");
  std::vector<StageOutcome> out;
  out.push_back({Stage::kPretrainL1, TrainStage(init, l1_train, l1_dev, pretrain)});
  out.push_back(
      {Stage::kFinetuneL2, TrainStage(out.back().result.best_params, l2_train, l2_dev, finetune)});
  if (mfc)
    out.push_back({Stage::kMfc, TrainStage(out.back().result.best_params, l2_train, l2_dev, *mfc)});
  return out;
}

}  // namespace mdd
