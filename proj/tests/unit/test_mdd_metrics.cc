// tests/unit/test_mdd_metrics.cc

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

#include <random>

#include "doctest.h"
#include "mdd/error.h"
#include "mdd/mdd_metrics.h"
#include "mdd/phone_inventory.h"
#include "oracles/oracles.h"
#include "test_util.h"

namespace mdd {

namespace {

using V = std::vector<int>;

MddCounts Counts(const V& c, const V& r, const V& h) { return ComputeMddCounts(c, r, h); }

}  // namespace

TEST_CASE("alignment examples") {
  const AlignmentTrace same = Align(V{0, 1}, V{0, 1});
  CHECK(same.cost() == 0);
  CHECK(same.count(EditOp::kMatch) == 2);
  const AlignmentTrace del = Align(V{0}, V{});
  CHECK(del.cost() == 1);
  CHECK(del.count(EditOp::kDelete) == 1);
  CHECK(Align(V{}, V{}).steps.empty());
}

TEST_CASE("alignment cost equals the edit distance oracle on random pairs") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    const V a = testing::RandomSequence(rng, trial % 7, 3);
    const V b = testing::RandomSequence(rng, (trial / 7) % 7, 3);
    const AlignmentTrace t = Align(a, b);
    CHECK(t.cost() == oracle::Levenshtein(a, b));
    CHECK(EditDistance(a, b) == oracle::Levenshtein(a, b));
    CHECK(oracle::TraceTransforms(t, a, b));
  }
}

TEST_CASE("alignment ties prefer substitution over delete plus insert") {
  const AlignmentTrace t = Align(V{0}, V{1});
  REQUIRE(t.steps.size() == 1);
  CHECK(t.steps[0].op == EditOp::kSubstitute);
}

TEST_CASE("canonical anchored labels") {
  const PhoneInventory inv = PhoneInventory::Default();
  const int z = inv.Index("z"), s = inv.Index("s");
  const AnchoredLabels zs = CanonicalAnchoredLabels(V{z}, V{s});
  REQUIRE(zs.positions.size() == 1);
  CHECK(zs.positions[0] == PositionLabel{PositionKind::kSubstituted, s});

  const AnchoredLabels same = CanonicalAnchoredLabels(V{0, 1, 2}, V{0, 1, 2});
  for (const PositionLabel& l : same.positions) CHECK(l.kind == PositionKind::kCorrect);
  CHECK(same.insertions == 0);

  const AnchoredLabels ins = CanonicalAnchoredLabels(V{0, 1}, V{0, 5, 1});
  CHECK(ins.positions[0].kind == PositionKind::kCorrect);
  CHECK(ins.positions[1].kind == PositionKind::kCorrect);
  CHECK(ins.insertions == 1);
  CHECK(ins.gap_insertions == std::vector<int>{0, 1, 0});
}

TEST_CASE("mdd count examples") {
  const PhoneInventory inv = PhoneInventory::Default();
  const int z = inv.Index("z"), s = inv.Index("s");
  const MddCounts zs = Counts(V{z}, V{s}, V{s});
  CHECK(zs.tn == 1);
  CHECK(zs.cd == 1);
  CHECK(zs.c_d == 1);
  CHECK(zs.c_h == 1);
  CHECK(zs.c_dh == 1);

  const MddCounts clean = Counts(V{0, 1}, V{0, 1}, V{0, 1});
  CHECK(clean.tp == 2);
  CHECK(clean.fp + clean.fn + clean.tn + clean.c_d + clean.c_h + clean.c_dh == 0);

  // a b c / a x c / a y z
  const MddCounts mixed = Counts(V{0, 1, 2}, V{0, 10, 2}, V{0, 11, 12});
  CHECK(mixed.tp == 1);
  CHECK(mixed.tn == 1);
  CHECK(mixed.id == 1);
  CHECK(mixed.fn == 1);
  CHECK(mixed.c_h == 1);
  CHECK(mixed.c_d == 2);
  CHECK(mixed.c_dh == 1);
}

TEST_CASE("counts agree with the construction-label oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 9;
    V canonical(n);
    for (int i = 0; i < n; ++i) canonical[i] = i;
    int fresh = 100;
    const oracle::ErrorSpec ref = oracle::RandomUnambiguousSpec(rng, canonical, &fresh, 0.3);
    oracle::ErrorSpec hyp = oracle::RandomUnambiguousSpec(rng, canonical, &fresh, 0.3);
    // Sometimes copy the reference diagnosis so agreement cases occur.
    if (u(rng) < 0.5) hyp = ref;
    if (u(rng) < 0.5) {
      // Turning errors back into correct positions keeps the pattern
      // unambiguous.
      for (std::size_t k = 0; k < hyp.positions.size(); ++k)
        if (u(rng) < 0.3) hyp.positions[k] = {};
    }
    const MddCounts expected = oracle::CountsFromSpecs(canonical, ref, hyp);
    const MddCounts got =
        Counts(canonical, oracle::Realise(canonical, ref), oracle::Realise(canonical, hyp));
    CHECK(got == expected);
    CHECK(got.cd + got.id == got.tn);
    CHECK(got.positions() == n);
    CHECK(got.c_dh <= std::min(got.c_d, got.c_h));
  }
}

TEST_CASE("utterance f1 values") {
  MddCounts c;
  c.c_d = 3, c.c_h = 4, c.c_dh = 2;
  CHECK(UtteranceF1(c) == 4.0 / 7.0);
  CHECK(UtteranceF1(MddCounts{}) == 1.0);
  MddCounts fa;
  fa.c_d = 5;
  CHECK(UtteranceF1(fa) == 0.0);
}

TEST_CASE("utterance f1 is bounded and monotone in the overlap") {
  for (int cd = 0; cd <= 6; ++cd) {
    for (int ch = 0; ch <= 6; ++ch) {
      double prev = -1.0;
      for (int both = 0; both <= std::min(cd, ch); ++both) {
        MddCounts c;
        c.c_d = cd, c.c_h = ch, c.c_dh = both;
        const double f = UtteranceF1(c);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
        CHECK(f >= prev);
        prev = f;
      }
    }
  }
}

TEST_CASE("hypothesis equal to reference is perfect") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const V c = testing::RandomSequence(rng, 1 + trial % 8, 5);
    const V r = testing::RandomSequence(rng, trial % 9, 5);
    const MddCounts m = Counts(c, r, r);
    CHECK(m.fp == 0);
    CHECK(m.fn == 0);
    CHECK(m.id == 0);
    CHECK(UtteranceF1(m) == 1.0);
    CHECK(m.phone_errors == 0);
  }
}

TEST_CASE("corpus metrics") {
  MddCounts c;
  c.tn = 10, c.cd = 6, c.id = 4;
  const MddCounts one[] = {c};
  CHECK(CorpusMetrics(one).dar == 0.6);
  CHECK_THROWS_AS(CorpusMetrics(std::span<const MddCounts>{}), ContractError);

  MddCounts clean;
  clean.tp = 5;
  clean.reference_length = 5;
  const MddCounts clean_list[] = {clean};
  const MetricReport r = CorpusMetrics(clean_list);
  CHECK(!r.recall.has_value());
  CHECK(!r.precision.has_value());
  CHECK(!r.f1.has_value());
  CHECK(!r.dar.has_value());
  CHECK(r.per == 0.0);
}

TEST_CASE("corpus f1 is the harmonic mean of re and pr") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> d(0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    MddCounts c;
    c.tp = d(rng), c.fp = d(rng), c.fn = d(rng), c.tn = 1 + d(rng);
    c.cd = c.tn / 2, c.id = c.tn - c.cd;
    c.reference_length = 100;
    const MddCounts list[] = {c};
    const MetricReport r = CorpusMetrics(list);
    REQUIRE(r.f1.has_value());
    CHECK(std::abs(*r.f1 - 2 * *r.precision * *r.recall / (*r.precision + *r.recall)) < 1e-12);
  }
}

TEST_CASE("published rows reproduce their f1") {
  const double rows[][3] = {{52.88, 35.42, 42.42}, {71.76, 35.96, 47.91}};
  for (const auto& row : rows) {
    const std::int64_t R = std::llround(row[0] * 100), P = std::llround(row[1] * 100);
    MddCounts c;
    c.tn = R * P;
    c.fp = 10000 * P - R * P;
    c.fn = 10000 * R - R * P;
    const MddCounts list[] = {c};
    CHECK(std::abs(*CorpusMetrics(list).f1 * 100 - row[2]) <= 0.01);
  }
}

TEST_CASE("per phone counts partition the global counts") {
  std::mt19937_64 rng(6);
  std::vector<ScoredUtterance> corpus;
  MddCounts total;
  for (int i = 0; i < 5; ++i) {
    ScoredUtterance u;
    u.canonical = testing::RandomSequence(rng, 6, 4);
    u.reference = testing::RandomSequence(rng, 6, 4);
    u.hypothesis = testing::RandomSequence(rng, 5, 4);
    total += ComputeMddCounts(u.canonical, u.reference, u.hypothesis);
    corpus.push_back(u);
  }
  const auto per = PerPhoneMetrics(corpus);
  MddCounts sum;
  for (const auto& [phone, m] : per) {
    sum.tp += m.counts.tp, sum.fp += m.counts.fp, sum.fn += m.counts.fn, sum.tn += m.counts.tn;
    sum.cd += m.counts.cd, sum.id += m.counts.id;
  }
  CHECK(sum.tp == total.tp);
  CHECK(sum.fp == total.fp);
  CHECK(sum.fn == total.fn);
  CHECK(sum.tn == total.tn);
  CHECK(sum.cd == total.cd);
  CHECK(sum.id == total.id);
}

TEST_CASE("per phone map only holds canonical phones") {
  const PhoneInventory inv = PhoneInventory::Default();
  const int z = inv.Index("z"), s = inv.Index("s");
  std::vector<ScoredUtterance> corpus = {{{z}, {s}, {s}}, {{z, z}, {z, z}, {s, z}}};
  const auto per = PerPhoneMetrics(corpus);
  REQUIRE(per.size() == 1);
  const PhoneMetrics& m = per.at(z);
  // Recount by hand: positions (MP,MP) cd, (CP,MP) fn, (CP,CP) tp.
  CHECK(m.counts.tn == 1);
  CHECK(m.counts.cd == 1);
  CHECK(m.counts.fn == 1);
  CHECK(m.counts.tp == 1);
  CHECK(m.recall == 1.0);
  CHECK(m.precision == 0.5);
}

TEST_CASE("phone error rate uses reference length") {
  const MddCounts c = Counts(V{0, 1, 2}, V{0, 1, 2}, V{0, 2});
  CHECK(c.phone_errors == 1);
  CHECK(c.reference_length == 3);
  const MddCounts list[] = {c};
  CHECK(CorpusMetrics(list).per == doctest::Approx(1.0 / 3.0));
}

}  // namespace mdd
