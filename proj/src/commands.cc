// src/commands.cc

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

#include "mdd/commands.h"

#include <cstdlib>
#include <filesystem>
#include <map>

#include <json.hpp>

#include "mdd/checkpoint.h"
#include "mdd/config_json.h"
#include "mdd/error.h"
#include "mdd/text_io.h"

#ifndef MDD_SOURCE_CONFIG_DIR
#define MDD_SOURCE_CONFIG_DIR "configs"
#endif

namespace mdd {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<Utterance> LoadCorpus(const PhoneInventory& inventory, const std::string& path,
                                  bool need_reference) {
  std::vector<Utterance> corpus = LoadManifest(path, inventory);
  if (need_reference) {
    for (const Utterance& u : corpus)
      if (!u.reference)
        throw FormatError(path + ": record '" + u.id + "' has no reference phones");
  }
  return corpus;
}

void CheckFeatureDim(const std::vector<Utterance>& corpus, const ModelConfig& config,
                     const std::string& what) {
  for (const Utterance& u : corpus)
    if (u.feature_dim() != config.feature_dim)
      throw DimensionError(what + ": record '" + u.id + "' has feature dimension " +
                           std::to_string(u.feature_dim()) + ", the model expects " +
                           std::to_string(config.feature_dim));
}

json StatsJson(const PhoneInventory& inventory, const GenStats& st, int num_utterances) {
  json hist = json::object();
  for (int p = 0; p < inventory.num_phones(); ++p)
    hist[inventory.Symbol(p)] = st.canonical_histogram[static_cast<std::size_t>(p)];
  std::vector<std::pair<std::int64_t, std::pair<int, int>>> top;
  for (const auto& [pair, n] : st.confusions) top.push_back({-n, pair});
  std::sort(top.begin(), top.end());
  json pairs = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(5, top.size()); ++i)
    pairs.push_back({{"canonical", inventory.Symbol(top[i].second.first)},
                     {"spoken", inventory.Symbol(top[i].second.second)},
                     {"count", -top[i].first}});
  return {{"format", "mdd-gen-stats"},
          {"version", 1},
          {"utterances", num_utterances},
          {"canonical_phones", st.canonical_phones},
          {"frames", st.frames},
          {"substitutions", st.substitutions},
          {"deletions", st.deletions},
          {"insertions", st.insertions},
          {"top_confusions", std::move(pairs)},
          {"canonical_histogram", std::move(hist)}};
}

std::string EpochLine(Stage stage, const EpochLog& e) {
  return std::string(StageName(stage)) + " epoch " + std::to_string(e.epoch) +
         ": train_loss=" + FormatDouble(e.train_loss) + " dev_per=" + FormatMetric(e.dev_per) +
         " dev_f1=" + FormatMetric(e.dev_f1) + " dev_dar=" + FormatMetric(e.dev_dar);
}

}  // namespace

std::string DefaultConfigDir() {
  if (const char* env = std::getenv(kConfigDirEnv); env && *env) return env;
  return MDD_SOURCE_CONFIG_DIR;
}

std::string ResolveConfigPath(const std::string& name) {
  if (fs::exists(name)) return name;
  fs::path p(name);
  if (p.is_relative()) {
    fs::path candidate = fs::path(DefaultConfigDir()) / p;
    if (!candidate.has_extension()) candidate += ".json";
    if (fs::exists(candidate)) return candidate.string();
  }
  throw IoError("config '" + name + "' not found (also looked in " + DefaultConfigDir() + ")");
}

PhoneInventory LoadInventory(const std::string& path) {
  return path.empty() ? PhoneInventory::Default() : PhoneInventory::Load(path);
}

GenOptions LoadGenOptions(const std::string& path) {
  json j = LoadJsonFile(path);
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
  GenOptions o;
  if (auto it = j.find("split"); it != j.end()) {
    try {
      o.split = it->get<std::array<double, 3>>();
    } catch (const json::exception&) {
      throw ConfigError(path + ": 'split' must be three fractions");
    }
    j.erase("split");
  }
  if (auto it = j.find("split_seed"); it != j.end()) {
    if (!it->is_number_unsigned()) throw ConfigError(path + ": 'split_seed' must be an integer");
    o.split_seed = it->get<std::uint64_t>();
    j.erase("split_seed");
  }
  o.config = GenConfigFromJson(j);
  return o;
}

void RunGen(const PhoneInventory& inventory, const GenOptions& options, std::ostream& log) {
  if (options.out_dir.empty()) throw ConfigError("gen: an output directory is required");
  GeneratedCorpus gen = Generate(inventory, options.config);
  const std::string dir = options.out_dir;
  MakeDirectories(dir);

  ManifestOptions mo;
  mo.inline_features = options.inline_features;
  SaveManifest(dir + "/manifest.jsonl", gen.utterances, inventory, mo);
  if (!gen.utterances.empty()) {
    CorpusSplit split = SplitCorpus(gen.utterances, options.split, options.split_seed);
    mo.write_feature_files = false;
    SaveManifest(dir + "/train.jsonl", split.train, inventory, mo);
    SaveManifest(dir + "/dev.jsonl", split.dev, inventory, mo);
    SaveManifest(dir + "/test.jsonl", split.test, inventory, mo);
  }

  const GenStats& st = gen.stats;
  WriteFile(dir + "/stats.json", StatsJson(inventory, st, options.config.num_utterances).dump(2) + "\n");
  {
    CsvWriter w(dir + "/phone_histogram.csv", {"phone", "canonical_count", "reference_count"});
    for (int p = 0; p < inventory.num_phones(); ++p)
      w.AddRow({inventory.Symbol(p),
                std::to_string(st.canonical_histogram[static_cast<std::size_t>(p)]),
                std::to_string(st.reference_histogram[static_cast<std::size_t>(p)])});
  }
  {
    CsvWriter w(dir + "/confusions.csv", {"canonical", "spoken", "count"});
    for (const auto& [pair, n] : st.confusions)
      w.AddRow({inventory.Symbol(pair.first), inventory.Symbol(pair.second), std::to_string(n)});
  }
  json effective = ToJson(options.config);
  effective["split"] = options.split;
  effective["split_seed"] = options.split_seed;
  WriteFile(dir + "/gen_config.json", effective.dump(2) + "\n");
  log << "gen: " << gen.utterances.size() << " utterances, " << st.canonical_phones
      << " canonical phones, " << st.substitutions << " substitutions, " << st.deletions
      << " deletions, " << st.insertions << " insertions -> " << dir << "\n";
}

void WriteTrainLog(const std::string& path, const std::vector<EpochLog>& log) {
  CsvWriter w(path, {"epoch", "train_loss", "dev_per", "dev_f1", "dev_dar"});
  for (const EpochLog& e : log)
    w.AddRow({std::to_string(e.epoch), FormatDouble(e.train_loss), FormatMetric(e.dev_per),
              FormatMetric(e.dev_f1), FormatMetric(e.dev_dar)});
}

TrainResult RunTrain(const PhoneInventory& inventory, const TrainOptions& options,
                     std::ostream& log) {
  const TrainConfig& config = options.config;
  config.Validate();
  if (options.train_manifest.empty()) throw ConfigError("train: --train is required");
  if (options.checkpoint_out.empty()) throw ConfigError("train: --checkpoint-out is required");
  const std::vector<Utterance> train = LoadCorpus(inventory, options.train_manifest, true);
  if (train.empty()) throw FormatError(options.train_manifest + ": no utterances");
  std::vector<Utterance> dev;
  if (!options.dev_manifest.empty()) dev = LoadCorpus(inventory, options.dev_manifest, true);

  ModelParams start;
  std::optional<TrainState> resume;
  if (options.checkpoint_in.empty()) {
    if (config.stage != Stage::kPretrainL1)
      throw ConfigError(std::string("train: stage ") + StageName(config.stage) +
                        " requires --checkpoint-in");
    if (options.resume) throw ConfigError("train: --resume requires --checkpoint-in");
    ModelConfig mc = options.model_config.value_or(
        MakeModelConfig(inventory, train[0].feature_dim(), config.seed));
    mc.output_size = inventory.output_size();
    start = ModelParams::Init(mc);
  } else {
    Checkpoint ck = LoadCheckpoint(options.checkpoint_in, inventory);
    start = std::move(ck.params);
    if (options.resume) {
      if (ck.stage != config.stage)
        throw ConfigError(std::string("train: cannot resume a ") + StageName(ck.stage) +
                          " checkpoint as stage " + StageName(config.stage));
      if (ck.rng_state.empty()) throw ConfigError("train: checkpoint carries no training state");
      resume = TrainState{start, std::move(ck.adam), std::move(ck.rng_state), ck.epoch};
    }
  }
  CheckFeatureDim(train, start.config, options.train_manifest);
  CheckFeatureDim(dev, start.config, options.dev_manifest);

  log << "train: stage " << StageName(config.stage) << ", " << train.size()
      << " training utterances, " << dev.size() << " dev utterances, " << config.epochs
      << " epochs\n";
  TrainResult result =
      TrainStage(start, train, dev, config, nullptr, resume ? &*resume : nullptr);
  for (const EpochLog& e : result.log) log << EpochLine(config.stage, e) << "\n";

  Checkpoint best;
  best.inventory_fingerprint = inventory.Fingerprint();
  best.stage = config.stage;
  best.epoch = result.best_epoch;
  best.train_config = config;
  best.params = result.best_params;
  SaveCheckpoint(options.checkpoint_out, best);

  Checkpoint last = best;
  last.epoch = result.final_state.epoch;
  last.params = result.final_state.params;
  last.adam = result.final_state.adam;
  last.rng_state = result.final_state.rng_state;
  SaveCheckpoint(options.checkpoint_out + ".last", last);

  if (!options.log_csv.empty()) WriteTrainLog(options.log_csv, result.log);
  log << "train: selected epoch " << result.best_epoch << " -> " << options.checkpoint_out << "\n";
  return result;
}

void RunDecode(const PhoneInventory& inventory, const DecodeOptions& options, std::ostream& log) {
  options.search.Validate();
  if (options.out.empty()) throw ConfigError("decode: --out is required");
  const Checkpoint ck = LoadCheckpoint(options.checkpoint, inventory);
  const std::vector<Utterance> corpus = LoadCorpus(inventory, options.corpus_manifest, false);
  CheckFeatureDim(corpus, ck.params.config, options.corpus_manifest);
  const std::vector<DecodedUtterance> decoded = DecodeCorpus(ck.params, corpus, options.search);
  SaveHypotheses(options.out, decoded, inventory, options.search.alpha);
  log << "decode: " << decoded.size() << " utterances, M=" << options.search.m_best << " -> "
      << options.out << "\n";
}

void WriteEvalReports(const PhoneInventory& inventory, const std::vector<Utterance>& corpus,
                      const CorpusEvaluation& ev, const std::string& out_dir) {
  MakeDirectories(out_dir);
  const MddCounts& t = ev.report.totals;
  {
    CsvWriter w(out_dir + "/summary.csv",
                {"RE", "PR", "F1", "DAR", "PER", "utt_f1", "TP", "FP", "FN", "TN", "CD", "ID",
                 "utterances"});
    w.AddRow({FormatMetric(ev.report.recall), FormatMetric(ev.report.precision),
              FormatMetric(ev.report.f1), FormatMetric(ev.report.dar), FormatMetric(ev.report.per),
              FormatMetric(ev.mean_utterance_f1), std::to_string(t.tp), std::to_string(t.fp),
              std::to_string(t.fn), std::to_string(t.tn), std::to_string(t.cd),
              std::to_string(t.id), std::to_string(ev.report.num_utterances)});
  }
  {
    CsvWriter w(out_dir + "/per_utterance.csv",
                {"id", "TP", "FP", "FN", "TN", "CD", "ID", "C_D", "C_H", "C_DH", "errors",
                 "reference_length", "utt_f1"});
    for (std::size_t i = 0; i < ev.ids.size(); ++i) {
      const MddCounts& c = ev.counts[i];
      w.AddRow({ev.ids[i], std::to_string(c.tp), std::to_string(c.fp), std::to_string(c.fn),
                std::to_string(c.tn), std::to_string(c.cd), std::to_string(c.id),
                std::to_string(c.c_d), std::to_string(c.c_h), std::to_string(c.c_dh),
                std::to_string(c.phone_errors), std::to_string(c.reference_length),
                FormatDouble(UtteranceF1(c))});
    }
  }
  std::map<std::string, const DecodedUtterance*> by_id;
  for (const DecodedUtterance& d : ev.decoded) by_id[d.id] = &d;
  std::vector<ScoredUtterance> scored;
  for (const Utterance& u : corpus) {
    auto it = by_id.find(u.id);
    if (!u.reference || it == by_id.end() || it->second->hypotheses.empty()) continue;
    scored.push_back({u.canonical.ids, u.reference->ids,
                      it->second->hypotheses.hypotheses[0].phones.ids});
  }
  CsvWriter w(out_dir + "/per_phone.csv",
              {"phone", "TP", "FP", "FN", "TN", "CD", "ID", "RE", "PR", "F1"});
  for (const auto& [phone, m] : PerPhoneMetrics(scored)) {
    const MddCounts& c = m.counts;
    w.AddRow({inventory.Symbol(phone), std::to_string(c.tp), std::to_string(c.fp),
              std::to_string(c.fn), std::to_string(c.tn), std::to_string(c.cd),
              std::to_string(c.id), FormatMetric(m.recall), FormatMetric(m.precision),
              FormatMetric(m.f1)});
  }
}

CorpusEvaluation RunEval(const PhoneInventory& inventory, const EvalOptions& options,
                         std::ostream& log) {
  if (options.out_dir.empty()) throw ConfigError("eval: --out is required");
  const std::vector<Utterance> corpus = LoadCorpus(inventory, options.corpus_manifest, true);
  const std::vector<DecodedUtterance> decoded = LoadHypotheses(options.hypotheses, inventory);
  std::map<std::string, const DecodedUtterance*> by_id;
  for (const DecodedUtterance& d : decoded) by_id[d.id] = &d;
  for (const Utterance& u : corpus) {
    auto it = by_id.find(u.id);
    if (it == by_id.end() || it->second->hypotheses.empty())
      throw LookupError(options.hypotheses + ": no hypothesis for utterance '" + u.id + "'");
  }
  if (corpus.empty()) throw FormatError(options.corpus_manifest + ": no utterances");
  CorpusEvaluation ev = ScoreDecoded(corpus, decoded);
  WriteEvalReports(inventory, corpus, ev, options.out_dir);
  log << "eval: RE=" << FormatMetric(ev.report.recall)
      << " PR=" << FormatMetric(ev.report.precision) << " F1=" << FormatMetric(ev.report.f1)
      << " DAR=" << FormatMetric(ev.report.dar) << " PER=" << FormatMetric(ev.report.per) << "\n";
  return ev;
}

void SweepSpec::Validate() const {
  if (m_best.empty() || beta.empty()) throw ConfigError("sweep: the grid is empty");
  if (seeds.empty()) throw ConfigError("sweep: no seeds");
  for (int m : m_best)
    if (m < 1) throw ConfigError("sweep: M values must be >= 1");
  for (double b : beta)
    if (!(b >= 0.0 && b <= 1.0)) throw ConfigError("sweep: beta values must lie in [0, 1]");
  if (base.stage != Stage::kMfc) throw ConfigError("sweep: the base config must be an mfc stage");
  if (eval_beam_width < 1) throw ConfigError("sweep: eval_beam_width must be >= 1");
}

SweepSpec LoadSweepSpec(const std::string& path) {
  json j = LoadJsonFile(path);
  if (!j.is_object()) throw ConfigError(path + ": expected a JSON object");
  SweepSpec s;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      if (k == "m_best") s.m_best = it->get<std::vector<int>>();
      else if (k == "beta") s.beta = it->get<std::vector<double>>();
      else if (k == "seeds") s.seeds = it->get<std::vector<std::uint64_t>>();
      else if (k == "eval_beam_width") s.eval_beam_width = it->get<int>();
      else if (k == "include_baseline") s.include_baseline = it->get<bool>();
      else if (k != "base") throw ConfigError(path + ": unknown key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (auto it = j.find("base"); it != j.end())
    s.base = TrainConfigFromJson(*it, TrainConfig::ForStage(Stage::kMfc));
  s.Validate();
  return s;
}

TrainConfig BaselineConfig(const TrainConfig& mfc_base) {
  TrainConfig c = mfc_base;
  c.stage = Stage::kFinetuneL2;
  c.loss.beta = 0.0;
  c.selection = mfc_base.EffectiveSelection();
  return c;
}

TrainConfig CellConfig(const TrainConfig& mfc_base, int m_best, double beta, std::uint64_t seed) {
  TrainConfig c = mfc_base;
  c.stage = Stage::kMfc;
  c.loss.m_best = m_best;
  c.loss.beam_width = std::max(mfc_base.loss.beam_width, m_best);
  c.loss.beta = beta;
  c.seed = seed;
  return c;
}

std::vector<SweepRow> RunSweep(const SweepSpec& spec, const SweepInputs& inputs, std::ostream& log,
                               const std::function<void(const SweepRow&)>& on_row) {
  spec.Validate();
  const std::vector<Utterance>& held_out = inputs.test.empty() ? inputs.dev : inputs.test;
  if (held_out.empty()) throw ContractError("sweep: no held-out utterances to score");
  SearchConfig search;
  search.beam_width = spec.eval_beam_width;
  search.m_best = 1;
  search.alpha = spec.base.loss.alpha;
  search.max_len = spec.base.loss.max_len;

  std::vector<SweepRow> rows;
  auto run = [&](SweepRow row, const TrainConfig& cfg) {
    try {
      TrainResult r = TrainStage(inputs.start, inputs.train, inputs.dev, cfg);
      CorpusEvaluation ev = EvaluateCorpus(r.best_params, held_out, search);
      row.per = ev.report.per;
      row.f1 = ev.report.f1;
      row.dar = ev.report.dar;
      row.mean_utterance_f1 = ev.mean_utterance_f1;
    } catch (const std::exception& e) {
      row.status = std::string("failed: ") + e.what();
    }
    log << "sweep: " << row.kind << " M=" << row.m_best << " beta=" << FormatDouble(row.beta)
        << " seed=" << row.seed << " per=" << FormatMetric(row.per)
        << " f1=" << FormatMetric(row.f1) << " " << row.status << "\n";
    rows.push_back(row);
    if (on_row) on_row(rows.back());
  };

  for (std::uint64_t seed : spec.seeds) {
    if (spec.include_baseline) {
      TrainConfig cfg = BaselineConfig(spec.base);
      cfg.seed = seed;
      SweepRow row;
      row.kind = "baseline";
      row.seed = seed;
      run(row, cfg);
    }
    for (int m : spec.m_best) {
      for (double b : spec.beta) {
        SweepRow row;
        row.kind = "mfc";
        row.m_best = m;
        row.beta = b;
        row.seed = seed;
        run(row, CellConfig(spec.base, m, b, seed));
      }
    }
  }
  return rows;
}

void RunSweepCommand(const PhoneInventory& inventory, const SweepOptions& options,
                     std::ostream& log) {
  if (options.out_csv.empty()) throw ConfigError("sweep: --out is required");
  const SweepSpec spec = LoadSweepSpec(ResolveConfigPath(options.spec));
  SweepInputs in;
  in.start = LoadCheckpoint(options.checkpoint, inventory).params;
  in.train = LoadCorpus(inventory, options.train_manifest, true);
  if (!options.dev_manifest.empty()) in.dev = LoadCorpus(inventory, options.dev_manifest, true);
  if (!options.test_manifest.empty()) in.test = LoadCorpus(inventory, options.test_manifest, true);
  CheckFeatureDim(in.train, in.start.config, options.train_manifest);
  CheckFeatureDim(in.dev, in.start.config, options.dev_manifest);
  CheckFeatureDim(in.test, in.start.config, options.test_manifest);

  std::vector<SweepRow> done;
  RunSweep(spec, in, log, [&](const SweepRow& r) {
    done.push_back(r);
    WriteSweepCsv(options.out_csv, done);
  });
  WriteSweepCsv(options.out_csv, done);
}

void RunReport(const ReportOptions& options, std::ostream& log) {
  if (options.out_dir.empty()) throw ConfigError("report: --out is required");
  const std::vector<SweepRow> rows = ReadSweepCsv(options.sweep_csv);
  WriteSweepReport(rows, options.out_dir);
  log << "report: " << rows.size() << " rows -> " << options.out_dir << "\n";
}

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const LookupError*>(&e) ||
      dynamic_cast<const IoError*>(&e) || dynamic_cast<const DimensionError*>(&e))
    return 2;
  return 3;
}

}  // namespace mdd
