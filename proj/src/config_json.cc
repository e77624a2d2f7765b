// src/config_json.cc

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

#include "mdd/config_json.h"

#include <set>

#include "mdd/error.h"
#include "mdd/text_io.h"

namespace mdd {

using nlohmann::json;

namespace {

class Reader {
 public:
  Reader(const json& j, std::string what) : j_(j), what_(std::move(what)) {
    if (!j_.is_object()) throw ConfigError(what_ + ": expected a JSON object");
  }

  template <typename T>
  void Get(const char* key, T* out) {
    known_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      *out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError(what_ + ": key '" + key + "' has the wrong type");
    }
  }

  /// Marks a key handled by the caller.
  const json* Raw(const char* key) {
    known_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void Finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!known_.count(it.key())) throw ConfigError(what_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string what_;
  std::set<std::string> known_;
};

}  // namespace

json ToJson(const ModelConfig& c) {
  return {{"feature_dim", c.feature_dim},       {"encoder_hidden", c.encoder_hidden},
          {"decoder_hidden", c.decoder_hidden}, {"attention_dim", c.attention_dim},
          {"downsample_stride", c.downsample_stride}, {"output_size", c.output_size},
          {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const json& j, ModelConfig c) {
  Reader r(j, "model config");
  r.Get("feature_dim", &c.feature_dim);
  r.Get("encoder_hidden", &c.encoder_hidden);
  r.Get("decoder_hidden", &c.decoder_hidden);
  r.Get("attention_dim", &c.attention_dim);
  r.Get("downsample_stride", &c.downsample_stride);
  r.Get("output_size", &c.output_size);
  r.Get("seed", &c.seed);
  r.Finish();
  return c;
}

json ToJson(const LossConfig& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"m_best", c.m_best},
          {"beam_width", c.beam_width},
          {"max_len", c.max_len}};
}

LossConfig LossConfigFromJson(const json& j, LossConfig c) {
  Reader r(j, "loss config");
  r.Get("alpha", &c.alpha);
  r.Get("beta", &c.beta);
  r.Get("m_best", &c.m_best);
  r.Get("beam_width", &c.beam_width);
  r.Get("max_len", &c.max_len);
  r.Finish();
  return c;
}

json ToJson(const SearchConfig& c) {
  return {{"beam_width", c.beam_width},
          {"m_best", c.m_best},
          {"max_len", c.max_len},
          {"alpha", c.alpha},
          {"length_penalty", c.length_penalty}};
}

SearchConfig SearchConfigFromJson(const json& j, SearchConfig c) {
  Reader r(j, "search config");
  r.Get("beam_width", &c.beam_width);
  r.Get("m_best", &c.m_best);
  r.Get("max_len", &c.max_len);
  r.Get("alpha", &c.alpha);
  r.Get("length_penalty", &c.length_penalty);
  r.Finish();
  return c;
}

json ToJson(const GenConfig& c) {
  return {{"seed", c.seed},
          {"prototype_seed", c.prototype_seed},
          {"num_utterances", c.num_utterances},
          {"phones_per_utterance", {c.min_phones, c.max_phones}},
          {"feature_dim", c.feature_dim},
          {"frames_per_phone", {c.min_frames_per_phone, c.max_frames_per_phone}},
          {"prototype_scale", c.prototype_scale},
          {"emission_noise", c.emission_noise},
          {"p_sub", c.p_sub},
          {"p_del", c.p_del},
          {"p_ins", c.p_ins},
          {"confusion_bias", c.confusion_bias},
          {"bias_strength", c.bias_strength},
          {"id_prefix", c.id_prefix}};
}

GenConfig GenConfigFromJson(const json& j, GenConfig c) {
  Reader r(j, "gen config");
  r.Get("seed", &c.seed);
  r.Get("prototype_seed", &c.prototype_seed);
  r.Get("num_utterances", &c.num_utterances);
  std::array<int, 2> range{c.min_phones, c.max_phones};
  r.Get("phones_per_utterance", &range);
  c.min_phones = range[0];
  c.max_phones = range[1];
  range = {c.min_frames_per_phone, c.max_frames_per_phone};
  r.Get("frames_per_phone", &range);
  c.min_frames_per_phone = range[0];
  c.max_frames_per_phone = range[1];
  r.Get("feature_dim", &c.feature_dim);
  r.Get("prototype_scale", &c.prototype_scale);
  r.Get("emission_noise", &c.emission_noise);
  r.Get("p_sub", &c.p_sub);
  r.Get("p_del", &c.p_del);
  r.Get("p_ins", &c.p_ins);
  r.Get("confusion_bias", &c.confusion_bias);
  r.Get("bias_strength", &c.bias_strength);
  r.Get("id_prefix", &c.id_prefix);
  r.Finish();
  return c;
}

json ToJson(const TrainConfig& c) {
  return {{"stage", StageName(c.stage)},
          {"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"grad_clip_norm", c.grad_clip_norm},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon},
          {"loss", ToJson(c.loss)},
          {"seed", c.seed},
          {"selection", SelectionName(c.selection)},
          {"dev_beam_width", c.dev_beam_width}};
}

TrainConfig TrainConfigFromJson(const json& j) {
  if (!j.is_object()) throw ConfigError("train config: expected a JSON object");
  Stage stage = Stage::kPretrainL1;
  if (auto it = j.find("stage"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("train config: key 'stage' has the wrong type");
    stage = ParseStage(it->get<std::string>());
  }
  return TrainConfigFromJson(j, TrainConfig::ForStage(stage));
}

TrainConfig TrainConfigFromJson(const json& j, const TrainConfig& defaults) {
  TrainConfig c = defaults;
  Reader r(j, "train config");
  if (const json* s = r.Raw("stage")) {
    if (!s->is_string()) throw ConfigError("train config: key 'stage' has the wrong type");
    c.stage = ParseStage(s->get<std::string>());
  }
  r.Get("epochs", &c.epochs);
  r.Get("batch_size", &c.batch_size);
  r.Get("learning_rate", &c.learning_rate);
  r.Get("grad_clip_norm", &c.grad_clip_norm);
  r.Get("adam_beta1", &c.adam_beta1);
  r.Get("adam_beta2", &c.adam_beta2);
  r.Get("adam_epsilon", &c.adam_epsilon);
  if (const json* l = r.Raw("loss")) c.loss = LossConfigFromJson(*l, c.loss);
  r.Get("seed", &c.seed);
  if (const json* s = r.Raw("selection")) {
    if (!s->is_string()) throw ConfigError("train config: key 'selection' has the wrong type");
    c.selection = ParseSelection(s->get<std::string>());
  }
  r.Get("dev_beam_width", &c.dev_beam_width);
  r.Finish();
  return c;
}

json LoadJsonFile(const std::string& path) {
  const std::string text = ReadFile(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace mdd
