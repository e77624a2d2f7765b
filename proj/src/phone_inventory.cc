// src/phone_inventory.cc

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

#include "mdd/phone_inventory.h"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mdd/error.h"

namespace mdd {

namespace {

bool IsReserved(std::string_view s) {
  return s == PhoneInventory::kBlankSymbol || s == PhoneInventory::kUnkSymbol ||
         s == PhoneInventory::kEosSymbol;
}

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

PhoneInventory PhoneInventory::FromSymbols(const std::vector<std::string>& phones) {
  if (phones.empty()) throw FormatError("phone inventory: no phones listed");
  PhoneInventory inv;
  for (const std::string& p : phones) {
    if (p.empty()) throw FormatError("phone inventory: empty symbol");
    if (p.find_first_of(" \t,") != std::string::npos)
      throw FormatError("phone inventory: symbol '" + p + "' contains whitespace or a comma");
    if (IsReserved(p))
      throw FormatError("phone inventory: '" + p + "' is a reserved symbol");
    if (!inv.index_.emplace(p, static_cast<int>(inv.symbols_.size())).second)
      throw FormatError("phone inventory: duplicate symbol '" + p + "'");
    inv.symbols_.push_back(p);
  }
  inv.index_.emplace(std::string(kUnkSymbol), static_cast<int>(inv.symbols_.size()));
  inv.symbols_.emplace_back(kUnkSymbol);
  return inv;
}

PhoneInventory PhoneInventory::Parse(std::string_view text) {
  std::vector<std::string> phones;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = Trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    phones.emplace_back(line);
  }
  return FromSymbols(phones);
}

PhoneInventory PhoneInventory::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open phone inventory '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return Parse(buf.str());
}

PhoneInventory PhoneInventory::Default() {
  return FromSymbols({"aa", "ae", "ah", "ao", "aw", "ay", "b",  "ch", "d",  "dh",
                      "eh", "er", "ey", "f",  "g",  "hh", "ih", "iy", "jh", "k",
                      "l",  "m",  "n",  "ng", "ow", "oy", "p",  "r",  "s",  "sh",
                      "t",  "th", "uh", "uw", "v",  "w",  "y",  "z",  "zh", "sil"});
}

bool PhoneInventory::Contains(std::string_view symbol) const {
  return index_.find(std::string(symbol)) != index_.end();
}

int PhoneInventory::Index(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) {
    if (symbol == kBlankSymbol || symbol == kEosSymbol)
      throw ContractError("'" + std::string(symbol) + "' cannot appear in a phone sequence");
    throw LookupError("unknown phone " + std::string(symbol));
  }
  return it->second;
}

const std::string& PhoneInventory::Symbol(int index) const {
  static const std::string blank_symbol(kBlankSymbol);
  if (index == blank()) return blank_symbol;
  if (!IsPhone(index)) throw LookupError("phone index " + std::to_string(index) + " out of range");
  return symbols_[static_cast<std::size_t>(index)];
}

PhoneSequence PhoneInventory::Encode(const std::vector<std::string>& symbols,
                                     SequenceRole role) const {
  PhoneSequence seq;
  seq.role = role;
  seq.ids.reserve(symbols.size());
  for (const std::string& s : symbols) seq.ids.push_back(Index(s));
  return seq;
}

std::vector<std::string> PhoneInventory::Decode(std::span<const int> ids) const {
  Validate(ids);
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(symbols_[static_cast<std::size_t>(id)]);
  return out;
}

void PhoneInventory::Validate(std::span<const int> ids) const {
  for (int id : ids) {
    if (!IsPhone(id)) {
      throw ContractError("phone index " + std::to_string(id) +
                          (id == blank() ? " (blank/eos)" : "") +
                          " is not allowed in a phone sequence");
    }
  }
}

std::string PhoneInventory::Fingerprint() const {
  // 64-bit FNV-1a over "sym\n" for every index, blank included.
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 1099511628211ull;
  };
  for (const std::string& s : symbols_) mix(s);
  mix(kBlankSymbol);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> PhoneInventory::RegularSymbols() const {
  return {symbols_.begin(), symbols_.end() - 1};
}

}  // namespace mdd
