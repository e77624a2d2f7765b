// mdd/checkpoint.h

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

#ifndef MDD_CHECKPOINT_H_
#define MDD_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "mdd/acoustic_model.h"
#include "mdd/phone_inventory.h"
#include "mdd/trainer.h"

namespace mdd {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/**
   Binary layout, all integers little-endian:
     bytes 0-7    magic "MDDCKPT\0"
     u32          format version
     u64          header length H
     H bytes      JSON header: version, model config, inventory fingerprint,
                  stage, epoch, train config, parameter names and shapes,
                  optimizer step, RNG state
     doubles      parameter tensors in ParamId order, row-major
     doubles      optimizer first moments, then second moments, same order
                  (present only when the optimizer step is > 0)
   The file must end exactly after the last block.
*/
struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::string inventory_fingerprint;
  Stage stage = Stage::kPretrainL1;
  int epoch = 0;
  TrainConfig train_config;
  ModelParams params;
  AdamState adam;
  std::string rng_state;

  bool operator==(const Checkpoint&) const = default;
};

std::string SerializeCheckpoint(const Checkpoint& ckpt);
/// FormatError for truncated or corrupt data, an explicit error for an
/// unsupported version.
Checkpoint DeserializeCheckpoint(const std::string& bytes);

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint LoadCheckpoint(const std::string& path);
/// Also refuses a checkpoint built for a different phone inventory, naming
/// both fingerprints.
Checkpoint LoadCheckpoint(const std::string& path, const PhoneInventory& inventory);

}  // namespace mdd

#endif  // MDD_CHECKPOINT_H_
