// src/corpus.cc

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

#include "mdd/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>

#include "mdd/error.h"

namespace mdd {

namespace {

std::mt19937_64 UtteranceRng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::string UtteranceId(const std::string& prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%05d", index);
  return prefix + buf;
}

int Draw(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double Uniform(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Uniform over all phones (including unk) other than `avoid`.
int OtherPhone(std::mt19937_64& rng, int num_phones, int avoid) {
  int p = Draw(rng, 0, num_phones - 2);
  return p >= avoid ? p + 1 : p;
}

}  // namespace

void GenConfig::Validate(const PhoneInventory& inventory) const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw ConfigError(std::string("gen: ") + name + " must lie in [0, 1]");
  };
  if (num_utterances < 0) throw ConfigError("gen: num_utterances must be >= 0");
  if (min_phones < 1 || max_phones < min_phones)
    throw ConfigError("gen: phones_per_utterance range is degenerate");
  if (min_frames_per_phone < 1 || max_frames_per_phone < min_frames_per_phone)
    throw ConfigError("gen: frames_per_phone range is degenerate");
  if (feature_dim < 1) throw ConfigError("gen: feature_dim must be >= 1");
  if (!(emission_noise >= 0.0)) throw ConfigError("gen: emission_noise must be >= 0");
  if (!(prototype_scale > 0.0)) throw ConfigError("gen: prototype_scale must be > 0");
  prob(p_sub, "p_sub");
  prob(p_del, "p_del");
  prob(p_ins, "p_ins");
  prob(bias_strength, "bias_strength");
  if (p_sub + p_del > 1.0) throw ConfigError("gen: p_sub + p_del must be <= 1");
  for (const auto& [from, to] : confusion_bias) {
    if (!inventory.Contains(from) || !inventory.Contains(to))
      throw ConfigError("gen: confusion_bias " + from + "->" + to + " names an unknown phone");
    if (from == to) throw ConfigError("gen: confusion_bias maps " + from + " to itself");
  }
}

GenConfig L1Preset() {
  GenConfig c;
  c.seed = 11;
  c.num_utterances = 1000;
  c.id_prefix = "l1";
  return c;
}

GenConfig L2Preset() {
  GenConfig c;
  c.seed = 23;
  c.num_utterances = 2000;
  c.p_sub = 0.10;
  c.p_del = 0.001;
  c.p_ins = 0.001;
  c.confusion_bias = {{"z", "s"}, {"dh", "d"}, {"ih", "iy"}, {"d", "sil"}, {"er", "ah"}};
  c.id_prefix = "l2";
  return c;
}

Tensor PhonePrototypes(const PhoneInventory& inventory, const GenConfig& config) {
  const std::size_t n = static_cast<std::size_t>(inventory.num_phones());
  const std::size_t d = static_cast<std::size_t>(config.feature_dim);
  Tensor protos({n, d});
  std::mt19937_64 rng(config.prototype_seed);
  std::normal_distribution<double> normal(0.0, config.prototype_scale);
  for (std::size_t i = 0; i < protos.size(); ++i) protos.data()[i] = normal(rng);
  return protos;
}

GeneratedCorpus Generate(const PhoneInventory& inventory, const GenConfig& config) {
  config.Validate(inventory);
  const int num_phones = inventory.num_phones();
  const int num_regular = inventory.num_regular();
  const std::size_t d = static_cast<std::size_t>(config.feature_dim);
  const Tensor protos = PhonePrototypes(inventory, config);

  std::map<int, int> bias;
  for (const auto& [from, to] : config.confusion_bias)
    bias[inventory.Index(from)] = inventory.Index(to);

  GeneratedCorpus out;
  GenStats& st = out.stats;
  st.canonical_histogram.assign(static_cast<std::size_t>(num_phones), 0);
  st.reference_histogram.assign(static_cast<std::size_t>(num_phones), 0);
  out.utterances.reserve(static_cast<std::size_t>(config.num_utterances));

  for (int u = 0; u < config.num_utterances; ++u) {
    std::mt19937_64 rng = UtteranceRng(config.seed, static_cast<std::uint64_t>(u));
    std::normal_distribution<double> noise(0.0, 1.0);
    Utterance utt;
    utt.id = UtteranceId(config.id_prefix, u);
    utt.canonical.role = SequenceRole::kCanonical;
    PhoneSequence ref;
    ref.role = SequenceRole::kReference;

    const int len = Draw(rng, config.min_phones, config.max_phones);
    for (int k = 0; k < len; ++k) {
      const int phone = Draw(rng, 0, num_regular - 1);
      utt.canonical.ids.push_back(phone);
      ++st.canonical_histogram[static_cast<std::size_t>(phone)];
      const double r = Uniform(rng);
      if (r < config.p_del) {
        ++st.deletions;
      } else if (r < config.p_del + config.p_sub) {
        int sub;
        auto it = bias.find(phone);
        if (it != bias.end() && Uniform(rng) < config.bias_strength)
          sub = it->second;
        else
          sub = OtherPhone(rng, num_phones, phone);
        ref.ids.push_back(sub);
        ++st.substitutions;
        ++st.confusions[{phone, sub}];
      } else {
        ref.ids.push_back(phone);
      }
      if (Uniform(rng) < config.p_ins) {
        ref.ids.push_back(Draw(rng, 0, num_phones - 1));
        ++st.insertions;
      }
    }
    st.canonical_phones += len;

    std::vector<double> frames;
    std::size_t num_frames = 0;
    for (int p : ref.ids) {
      ++st.reference_histogram[static_cast<std::size_t>(p)];
      const int dur = Draw(rng, config.min_frames_per_phone, config.max_frames_per_phone);
      for (int f = 0; f < dur; ++f, ++num_frames) {
        for (std::size_t j = 0; j < d; ++j)
          frames.push_back(protos.at(static_cast<std::size_t>(p), j) +
                           config.emission_noise * noise(rng));
      }
    }
    // An utterance whose every phone was deleted still needs one frame.
    if (num_frames == 0) {
      frames.assign(d, 0.0);
      num_frames = 1;
    }
    st.frames += static_cast<std::int64_t>(num_frames);
    utt.features = Tensor({num_frames, d}, std::move(frames));
    utt.reference = std::move(ref);
    out.utterances.push_back(std::move(utt));
  }
  return out;
}

void CheckUniqueIds(const std::vector<Utterance>& corpus) {
  std::set<std::string> seen;
  for (const Utterance& u : corpus)
    if (!seen.insert(u.id).second) throw FormatError("duplicate utterance id '" + u.id + "'");
}

CorpusSplit SplitCorpus(std::vector<Utterance> corpus, const std::array<double, 3>& fractions,
                        std::uint64_t seed) {
  if (corpus.empty()) throw ContractError("split: empty corpus");
  double total = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw ConfigError("split: fractions must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("split: fractions must sum to 1");
  std::sort(corpus.begin(), corpus.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  std::mt19937_64 rng(seed);
  // Fisher-Yates with our own index draws so the permutation does not depend
  // on the standard library's shuffle implementation.
  for (std::size_t i = corpus.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(corpus[i - 1], corpus[j]);
  }
  const std::size_t n = corpus.size();
  const std::size_t n_train = std::min(n, static_cast<std::size_t>(std::llround(fractions[0] * n)));
  const std::size_t n_dev =
      std::min(n - n_train, static_cast<std::size_t>(std::llround(fractions[1] * n)));
  CorpusSplit s;
  auto first = std::make_move_iterator(corpus.begin());
  s.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
  s.dev.assign(first + static_cast<std::ptrdiff_t>(n_train),
               first + static_cast<std::ptrdiff_t>(n_train + n_dev));
  s.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_dev),
                std::make_move_iterator(corpus.end()));
  return s;
}

}  // namespace mdd
