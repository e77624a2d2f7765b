// mdd/phone_inventory.h

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

#ifndef MDD_PHONE_INVENTORY_H_
#define MDD_PHONE_INVENTORY_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mdd/tensor.h"

namespace mdd {

enum class SequenceRole { kCanonical, kReference, kHypothesis };

/// Ordered phone indices. Indices always refer to regular phones or unk,
/// never to the blank/eos slot.
struct PhoneSequence {
  std::vector<int> ids;
  SequenceRole role = SequenceRole::kHypothesis;

  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
  std::span<const int> view() const { return ids; }
  bool operator==(const PhoneSequence& other) const = default;
};

/**
   The closed phone vocabulary.

   Index layout for an inventory file listing n phones:
     0 .. n-1   the listed phones, in file order
     n          unk
     n + 1      blank on the CTC head; eos (and start-of-sequence) on the
                attention head

   size() counts n + 2 (phones, unk and blank). eos shares the last index but
   lives on the attention head only and is never part of a PhoneSequence.
*/
class PhoneInventory {
 public:
  static constexpr std::string_view kBlankSymbol = "blank";
  static constexpr std::string_view kUnkSymbol = "unk";
  static constexpr std::string_view kEosSymbol = "eos";

  /// Builds from the regular phone list; throws FormatError on duplicates,
  /// empty symbols or reserved-symbol collisions.
  static PhoneInventory FromSymbols(const std::vector<std::string>& phones);

  /// One symbol per line; blank lines and lines starting with '#' are skipped.
  static PhoneInventory Load(const std::string& path);
  static PhoneInventory Parse(std::string_view text);

  /// The 39 CMU dictionary phones plus sil.
  static PhoneInventory Default();

  int num_regular() const { return static_cast<int>(symbols_.size()) - 1; }
  /// Number of phones that may appear in a sequence (regular + unk).
  int num_phones() const { return static_cast<int>(symbols_.size()); }
  int unk() const { return num_regular(); }
  int blank() const { return num_phones(); }
  int eos() const { return num_phones(); }
  /// Output width of both the CTC and the attention heads.
  int output_size() const { return num_phones() + 1; }
  /// Phones, unk and blank.
  std::size_t size() const { return symbols_.size() + 1; }

  bool Contains(std::string_view symbol) const;
  int Index(std::string_view symbol) const;
  const std::string& Symbol(int index) const;
  /// True for indices that may appear inside a PhoneSequence.
  bool IsPhone(int index) const { return index >= 0 && index < num_phones(); }

  PhoneSequence Encode(const std::vector<std::string>& symbols,
                       SequenceRole role = SequenceRole::kHypothesis) const;
  std::vector<std::string> Decode(std::span<const int> ids) const;
  /// Throws ContractError if any index is outside the phone range.
  void Validate(std::span<const int> ids) const;

  /// Stable hash of the index-to-symbol mapping, as 16 hex digits.
  std::string Fingerprint() const;
  /// The regular phones, in index order.
  std::vector<std::string> RegularSymbols() const;

 private:
  std::vector<std::string> symbols_;  // regular phones followed by unk
  std::unordered_map<std::string, int> index_;
};

/// T x d acoustic feature frames of one utterance.
using FeatureMatrix = Tensor;

struct Utterance {
  std::string id;
  FeatureMatrix features;
  PhoneSequence canonical;
  std::optional<PhoneSequence> reference;

  int num_frames() const { return static_cast<int>(features.dim(0)); }
  int feature_dim() const { return static_cast<int>(features.dim(1)); }
};

}  // namespace mdd

#endif  // MDD_PHONE_INVENTORY_H_
