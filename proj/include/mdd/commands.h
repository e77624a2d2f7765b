// mdd/commands.h

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

#ifndef MDD_COMMANDS_H_
#define MDD_COMMANDS_H_

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mdd/corpus.h"
#include "mdd/phone_inventory.h"
#include "mdd/report.h"
#include "mdd/trainer.h"

namespace mdd {

/// Environment variable naming the default config directory.
inline constexpr const char* kConfigDirEnv = "MDD_CONFIG_DIR";

/// $MDD_CONFIG_DIR if set, else the configs/ directory of the source tree.
std::string DefaultConfigDir();

/// A path that exists as given is returned unchanged; otherwise a relative
/// name is looked up in the config directory, with ".json" appended when it
/// has no extension. IoError when neither exists.
std::string ResolveConfigPath(const std::string& name);

/// The shipped default when `path` is empty.
PhoneInventory LoadInventory(const std::string& path);

struct GenOptions {
  GenConfig config;
  std::array<double, 3> split{0.8, 0.1, 0.1};
  std::uint64_t split_seed = 1;
  bool inline_features = false;
  std::string out_dir;
};

/// Reads a gen config file: GenConfig keys plus optional "split" (three
/// fractions) and "split_seed".
GenOptions LoadGenOptions(const std::string& path);

/// Writes manifest.jsonl (all utterances), train/dev/test.jsonl, features/,
/// stats.json, phone_histogram.csv, confusions.csv and the effective config.
void RunGen(const PhoneInventory& inventory, const GenOptions& options, std::ostream& log);

struct TrainOptions {
  TrainConfig config;
  std::string train_manifest;
  std::string dev_manifest;
  std::string checkpoint_in;
  std::string checkpoint_out;
  std::string log_csv;
  /// Continue optimizer and RNG state from checkpoint_in (same stage only).
  bool resume = false;
  /// Used only when a pretraining run starts without a checkpoint.
  std::optional<ModelConfig> model_config;
};

/// Trains one stage. checkpoint_out receives the selected parameters and
/// "<checkpoint_out>.last" the final training state.
TrainResult RunTrain(const PhoneInventory& inventory, const TrainOptions& options,
                     std::ostream& log);

void WriteTrainLog(const std::string& path, const std::vector<EpochLog>& log);

struct DecodeOptions {
  std::string checkpoint;
  std::string corpus_manifest;
  std::string out;
  SearchConfig search;
};

void RunDecode(const PhoneInventory& inventory, const DecodeOptions& options, std::ostream& log);

struct EvalOptions {
  std::string hypotheses;
  std::string corpus_manifest;
  std::string out_dir;
};

/// Writes summary.csv (RE, PR, F1, DAR, PER, ...), per_phone.csv and
/// per_utterance.csv.
CorpusEvaluation RunEval(const PhoneInventory& inventory, const EvalOptions& options,
                         std::ostream& log);

void WriteEvalReports(const PhoneInventory& inventory, const std::vector<Utterance>& corpus,
                      const CorpusEvaluation& ev, const std::string& out_dir);

struct SweepSpec {
  std::vector<int> m_best;
  std::vector<double> beta;
  std::vector<std::uint64_t> seeds{1};
  TrainConfig base = TrainConfig::ForStage(Stage::kMfc);
  /// Beam for the held-out top-1 decode.
  int eval_beam_width = 4;
  bool include_baseline = true;

  void Validate() const;
};

SweepSpec LoadSweepSpec(const std::string& path);

/// Cross-entropy continuation with the MFC stage's optimizer settings,
/// epochs and selection rule; the reference every MFC cell is compared to.
TrainConfig BaselineConfig(const TrainConfig& mfc_base);
TrainConfig CellConfig(const TrainConfig& mfc_base, int m_best, double beta, std::uint64_t seed);

struct SweepInputs {
  ModelParams start;
  std::vector<Utterance> train, dev, test;
};

/// Trains one MFC stage per grid cell (plus the baseline per seed) from the
/// shared start parameters and scores the selected parameters on `test`
/// (on `dev` when test is empty). A failing cell is recorded and the sweep
/// continues. `on_row` sees each row as it completes.
std::vector<SweepRow> RunSweep(const SweepSpec& spec, const SweepInputs& inputs,
                               std::ostream& log,
                               const std::function<void(const SweepRow&)>& on_row = nullptr);

struct SweepOptions {
  std::string spec;
  std::string checkpoint;
  std::string train_manifest, dev_manifest, test_manifest;
  std::string out_csv;
};

void RunSweepCommand(const PhoneInventory& inventory, const SweepOptions& options,
                     std::ostream& log);

struct ReportOptions {
  std::string sweep_csv;
  std::string out_dir;
};

void RunReport(const ReportOptions& options, std::ostream& log);

/// Exit status for an exception escaping a command: 1 usage/config,
/// 2 data (format, lookup, I/O, dimension), 3 anything else.
int ExitCodeFor(const std::exception& e);

}  // namespace mdd

#endif  // MDD_COMMANDS_H_
