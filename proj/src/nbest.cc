// src/nbest.cc

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

#include "mdd/nbest.h"

#include <algorithm>
#include <map>
#include <string>

#include "mdd/ctc.h"
#include "mdd/error.h"

namespace mdd {

namespace {

struct Beam {
  std::vector<int> ids;
  Tensor hidden;
  double att = 0.0;
};

struct Extension {
  std::size_t parent;
  int phone;
  double att;
};

int ResolveMaxLen(const SearchConfig& config, const EncoderOutput& enc) {
  return config.max_len > 0 ? config.max_len : enc.length();
}

// Rescore with the exact CTC log-probability, rank and keep the top M.
HypothesisList Finalize(std::vector<std::pair<std::vector<int>, double>> completed,
                        const EncoderOutput& enc, const SearchConfig& config) {
  HypothesisList list;
  list.m_best = config.m_best;
  list.hypotheses.reserve(completed.size());
  for (auto& [ids, att] : completed) {
    Hypothesis h;
    h.ctc_log_prob = CtcLogProb(enc.ctc_log_probs, ids);
    h.att_log_prob = att;
    h.joint_score = JointScore(config.alpha, h.ctc_log_prob, h.att_log_prob);
    h.phones.ids = std::move(ids);
    h.phones.role = SequenceRole::kHypothesis;
    list.hypotheses.push_back(std::move(h));
  }
  const double lp = config.length_penalty;
  std::sort(list.hypotheses.begin(), list.hypotheses.end(),
            [lp](const Hypothesis& a, const Hypothesis& b) { return HypothesisBefore(a, b, lp); });
  if (list.hypotheses.size() > static_cast<std::size_t>(config.m_best))
    list.hypotheses.resize(static_cast<std::size_t>(config.m_best));
  return list;
}

}  // namespace

void SearchConfig::Validate() const {
  if (m_best < 1) throw ConfigError("search: M must be >= 1, got " + std::to_string(m_best));
  if (beam_width < m_best)
    throw ConfigError("search: beam width " + std::to_string(beam_width) +
                      " is smaller than M = " + std::to_string(m_best));
  if (alpha < 0.0 || alpha > 1.0) throw ConfigError("search: alpha must lie in [0, 1]");
}

bool HypothesisBefore(const Hypothesis& a, const Hypothesis& b, double length_penalty) {
  const double ka = a.joint_score + length_penalty * static_cast<double>(a.phones.size());
  const double kb = b.joint_score + length_penalty * static_cast<double>(b.phones.size());
  if (ka != kb) return ka > kb;
  return a.phones.ids < b.phones.ids;
}

HypothesisList BeamSearch(const ModelParams& params, const EncoderOutput& enc,
                          const SearchConfig& config) {
  config.Validate();
  const int max_len = ResolveMaxLen(config, enc);
  const int eos = params.config.boundary_symbol();
  const std::size_t width = static_cast<std::size_t>(config.beam_width);

  // Keyed by sequence so a repeated expansion can never be emitted twice.
  std::map<std::vector<int>, double> completed;
  std::vector<Beam> live(1);
  live[0].hidden = InitialDecoderState(params.config);

  for (int step = 0; step <= max_len && !live.empty(); ++step) {
    std::vector<Extension> extensions;
    std::vector<Tensor> next_hidden(live.size());
    for (std::size_t b = 0; b < live.size(); ++b) {
      const int prev = live[b].ids.empty() ? eos : live[b].ids.back();
      DecoderStepResult r = DecoderStep(params, enc, live[b].hidden, prev);
      const double done = live[b].att + r.log_probs[static_cast<std::size_t>(eos)];
      auto [it, inserted] = completed.emplace(live[b].ids, done);
      if (!inserted) it->second = std::max(it->second, done);
      if (static_cast<int>(live[b].ids.size()) < max_len) {
        for (int p = 0; p < eos; ++p)
          extensions.push_back({b, p, live[b].att + r.log_probs[static_cast<std::size_t>(p)]});
      }
      next_hidden[b] = std::move(r.hidden);
    }
    const std::size_t keep = std::min(width, extensions.size());
    // Live prefixes all have the same length, so comparing (prefix, phone)
    // is the lexicographic tie-break on the extended sequence.
    auto better = [&live](const Extension& x, const Extension& y) {
      if (x.att != y.att) return x.att > y.att;
      const auto& px = live[x.parent].ids;
      const auto& py = live[y.parent].ids;
      if (px != py) return px < py;
      return x.phone < y.phone;
    };
    std::partial_sort(extensions.begin(), extensions.begin() + static_cast<std::ptrdiff_t>(keep),
                      extensions.end(), better);
    std::vector<Beam> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const Extension& e = extensions[i];
      Beam nb;
      nb.ids = live[e.parent].ids;
      nb.ids.push_back(e.phone);
      nb.hidden = next_hidden[e.parent];
      nb.att = e.att;
      next.push_back(std::move(nb));
    }
    live = std::move(next);
  }

  std::vector<std::pair<std::vector<int>, double>> done(completed.begin(), completed.end());
  return Finalize(std::move(done), enc, config);
}

HypothesisList ExhaustiveNbest(const ModelParams& params, const EncoderOutput& enc,
                               const SearchConfig& config) {
  if (config.m_best < 1) throw ConfigError("search: M must be >= 1");
  const int max_len = ResolveMaxLen(config, enc);
  const int eos = params.config.boundary_symbol();
  double count = 0.0, level = 1.0;
  for (int l = 0; l <= max_len; ++l) {
    count += level;
    level *= eos;
  }
  if (count > 1e5)
    throw SizeError("ExhaustiveNbest: " + std::to_string(static_cast<long long>(count)) +
                    " candidates exceed the 10^5 limit");

  std::vector<std::pair<std::vector<int>, double>> completed;
  struct Frame {
    std::vector<int> ids;
    Tensor hidden;
    double att;
  };
  std::vector<Frame> stack;
  stack.push_back({{}, InitialDecoderState(params.config), 0.0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const int prev = f.ids.empty() ? eos : f.ids.back();
    DecoderStepResult r = DecoderStep(params, enc, f.hidden, prev);
    completed.emplace_back(f.ids, f.att + r.log_probs[static_cast<std::size_t>(eos)]);
    if (static_cast<int>(f.ids.size()) >= max_len) continue;
    for (int p = eos - 1; p >= 0; --p) {
      Frame child{f.ids, r.hidden, f.att + r.log_probs[static_cast<std::size_t>(p)]};
      child.ids.push_back(p);
      stack.push_back(std::move(child));
    }
  }
  return Finalize(std::move(completed), enc, config);
}

}  // namespace mdd
