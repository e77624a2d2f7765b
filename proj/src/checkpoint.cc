// src/checkpoint.cc

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

#include "mdd/checkpoint.h"

#include <bit>
#include <cstring>

#include <json.hpp>

#include "mdd/config_json.h"
#include "mdd/error.h"
#include "mdd/text_io.h"

namespace mdd {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'M', 'D', 'D', 'C', 'K', 'P', 'T', '\0'};

template <typename T>
void PutLe(std::string* out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out->push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
}

void PutDoubles(std::string* out, const Tensor& t) {
  for (double d : t.storage()) PutLe(out, std::bit_cast<std::uint64_t>(d));
}

class ByteReader {
 public:
  explicit ByteReader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Get(const char* what) {
    Need(sizeof(T), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(T);
    return static_cast<T>(v);
  }

  std::string GetBytes(std::size_t n, const char* what) {
    Need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  void GetDoubles(Tensor* t, const char* what) {
    Need(t->size() * 8, what);
    for (std::size_t i = 0; i < t->size(); ++i) t->data()[i] = std::bit_cast<double>(Get<std::uint64_t>(what));
  }

  bool AtEnd() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) throw FormatError(std::string("checkpoint truncated in ") + what);
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string SerializeCheckpoint(const Checkpoint& ckpt) {
  json params = json::array();
  for (std::size_t k = 0; k < kNumParams; ++k)
    params.push_back({{"name", ParamName(static_cast<ParamId>(k))},
                      {"shape", ckpt.params.tensors[k].shape()}});
  json header = {{"format", "mdd-checkpoint"},
                 {"version", ckpt.version},
                 {"model", ToJson(ckpt.params.config)},
                 {"inventory_fingerprint", ckpt.inventory_fingerprint},
                 {"stage", StageName(ckpt.stage)},
                 {"epoch", ckpt.epoch},
                 {"train_config", ToJson(ckpt.train_config)},
                 {"parameters", std::move(params)},
                 {"optimizer_step", ckpt.adam.step},
                 {"rng_state", ckpt.rng_state}};
  const std::string h = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  PutLe(&out, ckpt.version);
  PutLe(&out, static_cast<std::uint64_t>(h.size()));
  out += h;
  for (const Tensor& t : ckpt.params.tensors) PutDoubles(&out, t);
  if (ckpt.adam.step > 0) {
    if (ckpt.adam.m.size() != kNumParams || ckpt.adam.v.size() != kNumParams)
      throw ContractError("checkpoint: optimizer state is incomplete");
    for (const Tensor& t : ckpt.adam.m) PutDoubles(&out, t);
    for (const Tensor& t : ckpt.adam.v) PutDoubles(&out, t);
  }
  return out;
}

Checkpoint DeserializeCheckpoint(const std::string& bytes) {
  ByteReader in(bytes);
  if (in.GetBytes(sizeof(kMagic), "magic") != std::string(kMagic, sizeof(kMagic)))
    throw FormatError("not a checkpoint file (bad magic)");
  Checkpoint c;
  c.version = in.Get<std::uint32_t>("version");
  if (c.version != kCheckpointVersion)
    throw FormatError("unsupported checkpoint version " + std::to_string(c.version) +
                      " (this build reads version " + std::to_string(kCheckpointVersion) + ")");
  const std::uint64_t hlen = in.Get<std::uint64_t>("header length");
  if (hlen > bytes.size()) throw FormatError("checkpoint truncated in header");
  json header;
  try {
    header = json::parse(in.GetBytes(static_cast<std::size_t>(hlen), "header"));
    c.params.config = ModelConfigFromJson(header.at("model"));
    c.params.config.Validate();
    c.inventory_fingerprint = header.at("inventory_fingerprint").get<std::string>();
    c.stage = ParseStage(header.at("stage").get<std::string>());
    c.epoch = header.at("epoch").get<int>();
    c.train_config = TrainConfigFromJson(header.at("train_config"));
    c.adam.step = header.at("optimizer_step").get<std::int64_t>();
    c.rng_state = header.at("rng_state").get<std::string>();
    const json& params = header.at("parameters");
    if (params.size() != kNumParams) throw FormatError("checkpoint: wrong number of parameters");
    for (std::size_t k = 0; k < kNumParams; ++k) {
      const ParamId id = static_cast<ParamId>(k);
      const Tensor::Shape shape = params[k].at("shape").get<Tensor::Shape>();
      if (params[k].at("name").get<std::string>() != ParamName(id) ||
          shape != ParamShape(c.params.config, id))
        throw FormatError(std::string("checkpoint: parameter ") + ParamName(id) +
                          " does not match the model config");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }

  for (std::size_t k = 0; k < kNumParams; ++k) {
    c.params.tensors[k] = Tensor(ParamShape(c.params.config, static_cast<ParamId>(k)));
    in.GetDoubles(&c.params.tensors[k], "parameters");
  }
  if (c.adam.step > 0) {
    for (auto* moments : {&c.adam.m, &c.adam.v}) {
      for (std::size_t k = 0; k < kNumParams; ++k) {
        moments->emplace_back(ParamShape(c.params.config, static_cast<ParamId>(k)));
        in.GetDoubles(&moments->back(), "optimizer state");
      }
    }
  }
  if (!in.AtEnd()) throw FormatError("checkpoint has trailing bytes");
  return c;
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  WriteFile(path, SerializeCheckpoint(ckpt));
}

Checkpoint LoadCheckpoint(const std::string& path) {
  try {
    return DeserializeCheckpoint(ReadFile(path));
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

Checkpoint LoadCheckpoint(const std::string& path, const PhoneInventory& inventory) {
  Checkpoint c = LoadCheckpoint(path);
  if (c.inventory_fingerprint != inventory.Fingerprint())
    throw FormatError(path + ": checkpoint inventory fingerprint " + c.inventory_fingerprint +
                      " does not match the phone inventory " + inventory.Fingerprint());
  if (c.params.config.output_size != inventory.output_size())
    throw FormatError(path + ": model output size does not match the phone inventory");
  return c;
}

}  // namespace mdd
