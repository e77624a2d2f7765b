// mdd/corpus.h

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

#ifndef MDD_CORPUS_H_
#define MDD_CORPUS_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mdd/phone_inventory.h"

namespace mdd {

struct GenConfig {
  std::uint64_t seed = 1;
  /// Seeds the per-phone prototype vectors. Corpora that must share an
  /// acoustic space (the L1 and L2 presets) use the same value.
  std::uint64_t prototype_seed = 7;
  int num_utterances = 100;
  int min_phones = 4, max_phones = 10;
  int feature_dim = 16;
  int min_frames_per_phone = 4, max_frames_per_phone = 7;
  double prototype_scale = 1.0;
  double emission_noise = 0.5;
  double p_sub = 0.0, p_del = 0.0, p_ins = 0.0;
  /// canonical symbol -> preferred substitute symbol.
  std::map<std::string, std::string> confusion_bias;
  /// Probability that a substitution of a biased phone picks its preferred
  /// substitute; otherwise the substitute is uniform over the other phones.
  double bias_strength = 0.5;
  std::string id_prefix = "utt";

  void Validate(const PhoneInventory& inventory) const;
};

/// No injected errors; native-speaker analogue.
GenConfig L1Preset();
/// Substitution-dominated error profile with the five most frequent
/// confusion pairs as biased substitutes.
GenConfig L2Preset();

struct GenStats {
  std::vector<std::int64_t> canonical_histogram;  // per phone id
  std::vector<std::int64_t> reference_histogram;
  std::int64_t canonical_phones = 0;
  std::int64_t substitutions = 0, deletions = 0, insertions = 0;
  std::int64_t frames = 0;
  /// (canonical, substitute) -> count
  std::map<std::pair<int, int>, std::int64_t> confusions;
};

struct GeneratedCorpus {
  std::vector<Utterance> utterances;
  GenStats stats;
};

/// Per-phone prototype vectors, row p for phone p (num_phones x feature_dim).
Tensor PhonePrototypes(const PhoneInventory& inventory, const GenConfig& config);

/// Deterministic given the config. Each utterance draws from its own
/// generator seeded by (seed, index).
GeneratedCorpus Generate(const PhoneInventory& inventory, const GenConfig& config);

struct CorpusSplit {
  std::vector<Utterance> train, dev, test;
};

/// Seeded shuffle of the utterances (taken in id order) cut by fractions.
/// Throws ConfigError when the fractions do not sum to one and
/// ContractError for an empty corpus.
CorpusSplit SplitCorpus(std::vector<Utterance> corpus, const std::array<double, 3>& fractions,
                        std::uint64_t seed);

/// Throws FormatError on duplicate ids.
void CheckUniqueIds(const std::vector<Utterance>& corpus);

}  // namespace mdd

#endif  // MDD_CORPUS_H_
