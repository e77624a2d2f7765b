// tools/mdd.cc

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

// Command-line driver: gen, train, decode, eval, sweep, report.
//
// Every command reads its settings from a JSON config (looked up in
// $MDD_CONFIG_DIR when given by name) and lets flags override single keys.
// Exit status: 0 success, 1 usage or config error, 2 data error, 3 runtime
// failure.

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "mdd/commands.h"
#include "mdd/config_json.h"
#include "mdd/error.h"

namespace {

template <typename T>
void Override(const std::optional<T>& flag, T* target) {
  if (flag) *target = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mdd;
  CLI::App app{"Mispronunciation detection toolkit with maximum-F1 training"};
  app.require_subcommand(1);
  std::string phones;
  app.add_option("--phones", phones, "Phone inventory file (default: built-in 39 phones + sil)");

  // gen
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  std::string gen_config = "gen_l2", gen_out;
  std::optional<std::uint64_t> gen_seed;
  std::optional<int> gen_n;
  std::optional<double> gen_noise;
  bool gen_inline = false;
  gen->add_option("--config", gen_config, "Gen config file or name")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Override seed");
  gen->add_option("--num-utterances", gen_n, "Override num_utterances");
  gen->add_option("--emission-noise", gen_noise, "Override emission_noise");
  gen->add_flag("--inline", gen_inline, "Store features inside the manifest");

  // train
  CLI::App* train = app.add_subcommand("train", "Train one stage");
  std::string stage_name, train_config;
  TrainOptions topt;
  std::string model_config;
  std::optional<int> t_epochs, t_batch, t_m, t_beam;
  std::optional<double> t_lr, t_beta, t_alpha;
  std::optional<std::uint64_t> t_seed;
  train->add_option("--stage", stage_name, "pretrain_l1, finetune_l2 or mfc")->required();
  train->add_option("--config", train_config, "Train config (default: train_<stage>)");
  train->add_option("--train", topt.train_manifest, "Training manifest")->required();
  train->add_option("--dev", topt.dev_manifest, "Dev manifest");
  train->add_option("--checkpoint-in", topt.checkpoint_in, "Starting checkpoint");
  train->add_option("--checkpoint-out", topt.checkpoint_out, "Output checkpoint")->required();
  train->add_option("--log", topt.log_csv, "Per-epoch CSV log");
  train->add_option("--model-config", model_config, "Model config for a fresh pretraining run");
  train->add_flag("--resume", topt.resume, "Continue optimizer and RNG state");
  train->add_option("--epochs", t_epochs);
  train->add_option("--batch-size", t_batch);
  train->add_option("--lr", t_lr);
  train->add_option("--beta", t_beta);
  train->add_option("--alpha", t_alpha);
  train->add_option("--m-best", t_m);
  train->add_option("--beam-width", t_beam);
  train->add_option("--seed", t_seed);

  // decode
  CLI::App* decode = app.add_subcommand("decode", "Write M-best hypothesis lists");
  DecodeOptions dopt;
  std::string decode_config;
  std::optional<int> d_m, d_beam, d_max_len;
  std::optional<double> d_alpha, d_lp;
  decode->add_option("--checkpoint", dopt.checkpoint)->required();
  decode->add_option("--corpus", dopt.corpus_manifest)->required();
  decode->add_option("--out", dopt.out)->required();
  decode->add_option("--config", decode_config, "Search config file or name");
  decode->add_option("--m-best", d_m);
  decode->add_option("--beam-width", d_beam);
  decode->add_option("--max-len", d_max_len);
  decode->add_option("--alpha", d_alpha);
  decode->add_option("--length-penalty", d_lp, "Ranking-only length bonus (default 0)");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Score hypotheses against references");
  EvalOptions eopt;
  eval->add_option("--hypotheses", eopt.hypotheses)->required();
  eval->add_option("--corpus", eopt.corpus_manifest)->required();
  eval->add_option("--out", eopt.out_dir, "Output directory")->required();

  // sweep
  CLI::App* sweep = app.add_subcommand("sweep", "MFC stage over an (M, beta) grid");
  SweepOptions sopt;
  sopt.spec = "sweep";
  sweep->add_option("--spec", sopt.spec, "Sweep spec file or name")->capture_default_str();
  sweep->add_option("--checkpoint", sopt.checkpoint, "Fine-tuned checkpoint")->required();
  sweep->add_option("--train", sopt.train_manifest)->required();
  sweep->add_option("--dev", sopt.dev_manifest);
  sweep->add_option("--test", sopt.test_manifest);
  sweep->add_option("--out", sopt.out_csv, "Output CSV")->required();

  // report
  CLI::App* report = app.add_subcommand("report", "SVG charts from a sweep CSV");
  ReportOptions ropt;
  report->add_option("--sweep", ropt.sweep_csv)->required();
  report->add_option("--out", ropt.out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const PhoneInventory inventory = LoadInventory(phones);
    if (*gen) {
      GenOptions o = LoadGenOptions(ResolveConfigPath(gen_config));
      o.out_dir = gen_out;
      o.inline_features = gen_inline;
      Override(gen_seed, &o.config.seed);
      Override(gen_n, &o.config.num_utterances);
      Override(gen_noise, &o.config.emission_noise);
      RunGen(inventory, o, std::cerr);
    } else if (*train) {
      const Stage stage = ParseStage(stage_name);
      const std::string name =
          train_config.empty() ? std::string("train_") + StageName(stage) : train_config;
      TrainConfig c = TrainConfigFromJson(LoadJsonFile(ResolveConfigPath(name)),
                                          TrainConfig::ForStage(stage));
      if (c.stage != stage)
        throw ConfigError("config " + name + " is for stage " + StageName(c.stage));
      Override(t_epochs, &c.epochs);
      Override(t_batch, &c.batch_size);
      Override(t_lr, &c.learning_rate);
      Override(t_beta, &c.loss.beta);
      Override(t_alpha, &c.loss.alpha);
      Override(t_m, &c.loss.m_best);
      Override(t_beam, &c.loss.beam_width);
      Override(t_seed, &c.seed);
      if (t_m && !t_beam) c.loss.beam_width = std::max(c.loss.beam_width, *t_m);
      topt.config = c;
      if (!model_config.empty())
        topt.model_config = ModelConfigFromJson(LoadJsonFile(ResolveConfigPath(model_config)));
      RunTrain(inventory, topt, std::cerr);
    } else if (*decode) {
      SearchConfig s;
      if (!decode_config.empty())
        s = SearchConfigFromJson(LoadJsonFile(ResolveConfigPath(decode_config)));
      Override(d_m, &s.m_best);
      Override(d_beam, &s.beam_width);
      Override(d_max_len, &s.max_len);
      Override(d_alpha, &s.alpha);
      Override(d_lp, &s.length_penalty);
      if (d_m && !d_beam) s.beam_width = std::max(s.beam_width, *d_m);
      dopt.search = s;
      RunDecode(inventory, dopt, std::cerr);
    } else if (*eval) {
      RunEval(inventory, eopt, std::cerr);
    } else if (*sweep) {
      RunSweepCommand(inventory, sopt, std::cerr);
    } else if (*report) {
      RunReport(ropt, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "mdd: error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return 0;
}
