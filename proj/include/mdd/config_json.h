// mdd/config_json.h

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

#ifndef MDD_CONFIG_JSON_H_
#define MDD_CONFIG_JSON_H_

#include <string>

#include <json.hpp>

#include "mdd/acoustic_model.h"
#include "mdd/corpus.h"
#include "mdd/mfc_loss.h"
#include "mdd/nbest.h"
#include "mdd/trainer.h"

namespace mdd {

// Conversions between configs and JSON objects. Readers start from the
// supplied defaults, so a file only lists the keys it changes; unknown keys
// are rejected with ConfigError.

nlohmann::json ToJson(const ModelConfig& c);
ModelConfig ModelConfigFromJson(const nlohmann::json& j, ModelConfig defaults = {});

nlohmann::json ToJson(const LossConfig& c);
LossConfig LossConfigFromJson(const nlohmann::json& j, LossConfig defaults = {});

nlohmann::json ToJson(const SearchConfig& c);
SearchConfig SearchConfigFromJson(const nlohmann::json& j, SearchConfig defaults = {});

nlohmann::json ToJson(const GenConfig& c);
GenConfig GenConfigFromJson(const nlohmann::json& j, GenConfig defaults = {});

/// A "stage" key picks the stage defaults before the other keys apply.
nlohmann::json ToJson(const TrainConfig& c);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);
TrainConfig TrainConfigFromJson(const nlohmann::json& j, const TrainConfig& defaults);

/// Parses a JSON config file; ConfigError with the path on malformed input.
nlohmann::json LoadJsonFile(const std::string& path);

}  // namespace mdd

#endif  // MDD_CONFIG_JSON_H_
