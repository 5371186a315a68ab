// core/include/switchasr/pipeline.h

// Copyright 2026  The switchasr Authors

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

#ifndef SWITCHASR_PIPELINE_H_
#define SWITCHASR_PIPELINE_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "switchasr/adapters.h"
#include "switchasr/decision.h"
#include "switchasr/manifest.h"
#include "switchasr/model.h"
#include "switchasr/rule_switcher.h"
#include "switchasr/surrogate.h"
#include "switchasr/synth.h"
#include "switchasr/trainer.h"
#include "switchasr/transcript.h"

namespace switchasr {

/// Runs fn(0..n-1) on up to `workers` threads. Results must be written by
/// index; if any call throws, the exception of the lowest failing index is
/// rethrown after all threads finish.
void ParallelFor(std::size_t n, int workers, const std::function<void(std::size_t)> &fn);

struct SirSnrSampling {
  enum class Mode { kGrid, kUniform };
  Mode mode = Mode::kGrid;
  std::vector<double> sir_db{0.0, 10.0, 20.0};
  std::vector<double> snr_db{0.0, 10.0, 20.0};
  int per_cell = 1;   // grid mode
  double lo_db = -2.0, hi_db = 22.0;
  int count = 0;      // uniform mode

  int Total() const;
};

struct SimulateOptions {
  SirSnrSampling sampling;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string prefix = "utt";
  bool interferer_enrollment = true;
  double overlap_ratio = 1.0;  // fraction of the utterance the interferer covers
  double peak_limit = 0.99;
  SurrogateConfig surrogate;
  int workers = 1;
};

/// Mixes target, interferer and noise at sampled SIR/SNR, writes every
/// component as 16-bit wav under out_dir and returns the manifest (not yet
/// saved). Each utterance draws from its own generator so the output does not
/// depend on `workers`.
Manifest SimulateCorpus(const SpeechPool &speech, const NoisePool &noise,
                        const SimulateOptions &opts);

struct EnhanceOptions {
  bool interferer = false;  // also extract the interferer where enrolled
  int workers = 1;
};

/// Runs the SE adapter on every record and stores the outputs under the
/// manifest directory.
void EnhanceCorpus(Manifest *manifest, SeAdapter &se, const EnhanceOptions &opts);

struct Hypotheses {
  std::string utt_id;
  Transcript mixture;
  Transcript enhanced;
};

/// Recognizes mixture and enhanced signal of every record. Throws ConfigError
/// before any adapter call if a record has no enhanced signal.
std::vector<Hypotheses> RecognizeCorpus(const Manifest &manifest, AsrAdapter &asr, int workers);

void WriteHypotheses(const std::vector<Hypotheses> &hyps, std::ostream &os);
std::vector<Hypotheses> ReadHypotheses(std::istream &is);

std::vector<LabeledRecord> LabelCorpus(const Manifest &manifest,
                                       const std::vector<Hypotheses> &hyps);

/// Paired log-mel features for the untied labeled records.
std::vector<TrainingExample> BuildExamples(const Manifest &manifest,
                                           const std::vector<LabeledRecord> &labels,
                                           int workers);

struct AdapterFailure {
  std::string utt_id;
  std::string message;
};

struct TrainingSet {
  std::vector<LabeledRecord> labels;     // every labeled record, ties included
  std::vector<TrainingExample> examples; // untied records with features
  std::vector<AdapterFailure> failures;  // skipped utterances
};

/// Enhances records that lack an enhanced signal (when `se` is given),
/// recognizes both signals, labels and extracts features. Adapter failures
/// skip the utterance and are collected; a corpus that ends up with only ties
/// yields an empty example set.
TrainingSet BuildTrainingSet(Manifest *manifest, SeAdapter *se, AsrAdapter &asr, int workers);

/// Label counts per (SIR, SNR) bin; bins are multiples of `bin_db`.
struct LabelCell {
  double sir_db = 0.0;
  double snr_db = 0.0;
  int mixture_better = 0;
  int enhanced_better = 0;
  int ties = 0;
};

std::vector<LabelCell> LabelDistribution(const Manifest &manifest,
                                         const std::vector<LabeledRecord> &labels,
                                         double bin_db = 10.0);
void WriteLabelDistribution(const std::vector<LabelCell> &cells, std::ostream &os);
std::vector<LabelCell> ReadLabelDistribution(std::istream &is);
std::string RenderLabelDistribution(const std::vector<LabelCell> &cells);

enum class Policy {
  kMixture,
  kEnhanced,
  kRule,
  kRuleOracle,
  kLearnedHard,
  kLearnedSoft,
  kFixedSoft,
  kOracleHard,
  kOracleSoft,
};

std::string_view PolicyName(Policy p);
/// Throws ConfigError on unknown names. "fixed-soft(w)" is accepted and
/// stores w in *weight when given.
Policy ParsePolicy(std::string_view name, double *weight = nullptr);
std::vector<Policy> AllPolicies();
bool NeedsModel(Policy p);

struct EvalOptions {
  RuleConfig rule;
  double soft_weight = 0.5;  // fixed-soft weight on the mixture
  double bin_db = 10.0;
  int workers = 1;
  const SwitchModel *model = nullptr;  // learned policies
  SeAdapter *se = nullptr;             // interferer extraction when not precomputed
};

struct EvalCell {
  double sir_db = 0.0;
  double snr_db = 0.0;
  CerStats stats;
};

struct UtteranceResult {
  std::string utt_id;
  double sir_db = 0.0;
  double snr_db = 0.0;
  bool excluded = false;
  CerStats stats;
  double weight_observed = 0.0;  // 1 = mixture, 0 = enhanced
};

struct EvalTable {
  Policy policy = Policy::kMixture;
  std::vector<EvalCell> cells;  // sorted by (sir, snr)
  CerStats total;
  int excluded = 0;
  /// Agreement with the oracle hard decision over untied utterances; hard
  /// switching policies only.
  std::optional<double> accuracy;
  int accuracy_count = 0;
  std::vector<UtteranceResult> utterances;
};

/// Evaluates several policies on one manifest, sharing recognitions of the
/// mixture and enhanced signals. Prerequisites (enhanced signals, model,
/// interferer extraction) are checked before any adapter call.
std::vector<EvalTable> EvaluatePolicies(const Manifest &manifest,
                                        const std::vector<Policy> &policies,
                                        AsrAdapter &asr, const EvalOptions &opts);

/// policy, sir_db, snr_db, errors, ref_chars, cer; a row with "all" bins for
/// the corpus total, and "#accuracy" / "#excluded" rows.
void WriteEvalTable(const EvalTable &t, std::ostream &os);
std::vector<EvalTable> ReadEvalTables(std::istream &is);

/// CER (%) per bin and overall, one row per policy.
std::string RenderEvalTables(const std::vector<EvalTable> &tables);

}  // namespace switchasr

#endif  // SWITCHASR_PIPELINE_H_
