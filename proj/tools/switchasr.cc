// tools/switchasr.cc

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

// Command-line front end: corpus simulation, enhancement, recognition,
// labeling, switch-model training, evaluation and reporting.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "switchasr/adapters.h"
#include "switchasr/checkpoint.h"
#include "switchasr/error.h"
#include "switchasr/features.h"
#include "switchasr/manifest.h"
#include "switchasr/pipeline.h"
#include "switchasr/synth.h"
#include "switchasr/trainer.h"
#include "switchasr/wav_io.h"

namespace fs = std::filesystem;
using namespace switchasr;

namespace {

struct Globals {
  std::string manifest;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string se_cmd;
  std::string asr_cmd;
  std::string checkpoint;
  std::string policy = "all";
  double lambda_db = 10.0;
  double soft_weight = 0.5;
  std::string cache_dir;
  double timeout_s = 600.0;
};

std::vector<double> ParseList(const std::string &s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::logic_error &) {
      throw ConfigError("bad number '" + item + "' in list '" + s + "'");
    }
  }
  return out;
}

std::ofstream OpenOut(const std::string &path) {
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  return os;
}

std::ifstream OpenIn(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  return is;
}

std::string RequireManifest(const Globals &g) {
  if (g.manifest.empty()) throw ConfigError("--manifest is required");
  return g.manifest;
}

CommandOptions AdapterOptions(const Globals &g) {
  CommandOptions o;
  o.manifest_path = g.manifest.empty() ? "" : fs::absolute(g.manifest).string();
  o.cache_dir = g.cache_dir;
  o.timeout = std::chrono::milliseconds(static_cast<long long>(g.timeout_s * 1000.0));
  return o;
}

std::vector<Policy> ParsePolicies(const std::string &choice, double *soft_weight) {
  if (choice == "all") return AllPolicies();
  std::vector<Policy> out;
  std::stringstream ss(choice);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParsePolicy(item, soft_weight));
  if (out.empty()) throw ConfigError("no policy given");
  return out;
}

std::vector<TrainingExample> LoadExamples(const std::string &manifest_path,
                                          const std::string &labels_path, int workers) {
  const Manifest m = Manifest::Load(manifest_path);
  return BuildExamples(m, ReadLabels(labels_path), workers);
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Switching between observed and enhanced speech for ASR"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--manifest", g.manifest, "Corpus manifest");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--workers", g.workers, "Parallel workers")->check(CLI::PositiveNumber);
  app.add_option("--se-cmd", g.se_cmd, "SE command template, or 'surrogate'");
  app.add_option("--asr-cmd", g.asr_cmd, "ASR command template, or 'surrogate'");
  app.add_option("--checkpoint", g.checkpoint, "Switch-model checkpoint");
  app.add_option("--policy", g.policy, "Policy name, comma list, or 'all'");
  app.add_option("--lambda-db", g.lambda_db, "Rule threshold on SIR - SNR (dB)");
  app.add_option("--soft-weight", g.soft_weight, "Fixed soft-switch weight on the mixture")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--cache-dir", g.cache_dir, "Cache directory for external adapters");
  app.add_option("--adapter-timeout", g.timeout_s, "Per-call adapter timeout (s)");

  // simulate
  auto *sim = app.add_subcommand("simulate", "Build a mixture corpus");
  std::string sim_out, sim_sir = "0,10,20", sim_snr = "0,10,20", sim_uniform, sim_prefix = "utt";
  std::string speech_dir, noise_dir;
  int per_cell = 1, count = 0, speakers = 40;
  std::uint64_t pool_seed = 1;
  double overlap = 1.0;
  bool no_ienroll = false;
  sim->add_option("--out", sim_out, "Output directory")->required();
  sim->add_option("--sir", sim_sir, "Grid SIR values (dB), comma separated");
  sim->add_option("--snr", sim_snr, "Grid SNR values (dB), comma separated");
  sim->add_option("--per-cell", per_cell, "Utterances per grid cell");
  sim->add_option("--uniform", sim_uniform, "Sample SIR and SNR uniformly from LO:HI dB");
  sim->add_option("--count", count, "Utterances in uniform mode");
  sim->add_option("--prefix", sim_prefix, "Utterance id prefix");
  sim->add_option("--speech-dir", speech_dir, "Speech pool <dir>/<speaker>/*.wav + .txt");
  sim->add_option("--noise-dir", noise_dir, "Noise pool directory of wav files");
  sim->add_option("--speakers", speakers, "Synthetic speakers when no speech dir is given");
  sim->add_option("--pool-seed", pool_seed, "Seed of the synthetic speaker pool");
  sim->add_option("--overlap", overlap, "Fraction of the utterance covered by the interferer");
  sim->add_flag("--no-interferer-enrollment", no_ienroll, "Leave interferer enrollment out");

  // enhance
  auto *enh = app.add_subcommand("enhance", "Run target-speaker extraction");
  bool enh_interferer = false;
  enh->add_flag("--interferer", enh_interferer, "Also extract the interfering speaker");

  // recognize
  auto *rec = app.add_subcommand("recognize", "Recognize mixture and enhanced signals");
  std::string rec_out;
  rec->add_option("--out", rec_out, "Hypotheses file")->required();

  // label
  auto *lab = app.add_subcommand("label", "Derive switch labels from CERs");
  std::string lab_out, lab_hyps, lab_dist;
  double bin_db = 10.0;
  lab->add_option("--out", lab_out, "Label file")->required();
  lab->add_option("--hyps", lab_hyps, "Precomputed hypotheses (skips recognition)");
  lab->add_option("--distribution", lab_dist, "Label distribution per SIR/SNR bin (tsv)");
  lab->add_option("--bin-db", bin_db, "Bin width for the distribution");

  // train
  auto *trn = app.add_subcommand("train", "Train the switch model");
  std::string trn_labels, dev_manifest, dev_labels, trn_log;
  TrainConfig tc;
  trn->add_option("--labels", trn_labels, "Training labels")->required();
  trn->add_option("--dev-manifest", dev_manifest, "Dev manifest")->required();
  trn->add_option("--dev-labels", dev_labels, "Dev labels")->required();
  trn->add_option("--log", trn_log, "Per-epoch log");
  trn->add_option("--epochs", tc.max_epochs, "Epochs");
  trn->add_option("--batch-size", tc.batch_size, "Mini-batch size");
  trn->add_option("--lr", tc.initial_lr, "Initial learning rate");
  trn->add_flag("--normalize,!--no-normalize", tc.normalize_features,
                "Per-dimension feature standardization fitted on train");

  // evaluate
  auto *ev = app.add_subcommand("evaluate", "Score switching policies");
  std::string ev_out, ev_md;
  double ev_bin = 10.0;
  ev->add_option("--out", ev_out, "CER table (tsv)")->required();
  ev->add_option("--markdown", ev_md, "Also render markdown");
  ev->add_option("--bin-db", ev_bin, "SIR/SNR bin width");

  // report
  auto *rep = app.add_subcommand("report", "Render tables as markdown");
  std::vector<std::string> rep_tables;
  std::string rep_dist, rep_out;
  rep->add_option("--tables", rep_tables, "CER tables from evaluate");
  rep->add_option("--distribution", rep_dist, "Label distribution from label");
  rep->add_option("--out", rep_out, "Markdown output (default stdout)");

  // surrogates as external tools
  auto *sse = app.add_subcommand("surrogate-se", "Surrogate extractor as an external tool");
  std::string s_utt, s_out, s_in, s_enroll;
  bool s_interferer = false;
  sse->add_option("--utt", s_utt)->required();
  sse->add_option("--output", s_out)->required();
  sse->add_option("--input", s_in, "Ignored; components come from the manifest");
  sse->add_option("--enroll", s_enroll, "Ignored; components come from the manifest");
  sse->add_flag("--interferer", s_interferer);
  auto *sasr = app.add_subcommand("surrogate-asr", "Surrogate recognizer as an external tool");
  sasr->add_option("--utt", s_utt)->required();
  sasr->add_option("--input", s_in)->required();
  sasr->add_option("--output", s_out, "Transcript file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      SimulateOptions so;
      so.seed = g.seed;
      so.out_dir = sim_out;
      so.prefix = sim_prefix;
      so.workers = g.workers;
      so.overlap_ratio = overlap;
      so.interferer_enrollment = !no_ienroll;
      if (!sim_uniform.empty()) {
        const auto colon = sim_uniform.find(':');
        if (colon == std::string::npos) throw ConfigError("--uniform expects LO:HI");
        so.sampling.mode = SirSnrSampling::Mode::kUniform;
        so.sampling.lo_db = ParseList(sim_uniform.substr(0, colon)).at(0);
        so.sampling.hi_db = ParseList(sim_uniform.substr(colon + 1)).at(0);
        so.sampling.count = count;
      } else {
        so.sampling.sir_db = ParseList(sim_sir);
        so.sampling.snr_db = ParseList(sim_snr);
        so.sampling.per_cell = per_cell;
      }
      const SpeechPool speech = speech_dir.empty() ? SpeechPool::Synthetic(speakers, pool_seed)
                                                   : SpeechPool::FromDirectory(speech_dir);
      const NoisePool noise =
          noise_dir.empty() ? NoisePool::Synthetic() : NoisePool::FromDirectory(noise_dir);
      const Manifest m = SimulateCorpus(speech, noise, so);
      const std::string path = g.manifest.empty() ? (fs::path(sim_out) / "manifest.txt").string()
                                                  : g.manifest;
      m.Save(path);
      std::cerr << "simulate: " << m.records().size() << " utterances -> " << path << '\n';
    } else if (*enh) {
      const std::string path = RequireManifest(g);
      Manifest m = Manifest::Load(path);
      auto se = MakeSeAdapter(g.se_cmd, AdapterOptions(g));
      EnhanceCorpus(&m, *se, {enh_interferer, g.workers});
      m.Save(path);
    } else if (*rec) {
      const Manifest m = Manifest::Load(RequireManifest(g));
      auto asr = MakeAsrAdapter(g.asr_cmd, AdapterOptions(g), g.seed);
      auto os = OpenOut(rec_out);
      WriteHypotheses(RecognizeCorpus(m, *asr, g.workers), os);
    } else if (*lab) {
      const std::string path = RequireManifest(g);
      Manifest m = Manifest::Load(path);
      std::vector<LabeledRecord> labels;
      if (!lab_hyps.empty()) {
        auto is = OpenIn(lab_hyps);
        labels = LabelCorpus(m, ReadHypotheses(is));
      } else {
        std::unique_ptr<SeAdapter> se;
        if (!g.se_cmd.empty()) se = MakeSeAdapter(g.se_cmd, AdapterOptions(g));
        auto asr = MakeAsrAdapter(g.asr_cmd, AdapterOptions(g), g.seed);
        const TrainingSet ts = BuildTrainingSet(&m, se.get(), *asr, g.workers);
        for (const auto &f : ts.failures) std::cerr << "label: skipped " << f.message << '\n';
        if (!ts.failures.empty())
          std::cerr << "label: " << ts.failures.size() << " utterance(s) failed\n";
        if (se) m.Save(path);
        labels = ts.labels;
      }
      if (FilterTies(labels).empty())
        std::cerr << "label: warning: no untied utterances; the training set is empty\n";
      WriteLabels(labels, lab_out);
      if (!lab_dist.empty()) {
        auto os = OpenOut(lab_dist);
        WriteLabelDistribution(LabelDistribution(m, labels, bin_db), os);
      }
    } else if (*trn) {
      if (g.checkpoint.empty()) throw ConfigError("--checkpoint (output) is required");
      tc.seed = g.seed;
      tc.Validate();
      const auto train = LoadExamples(RequireManifest(g), trn_labels, g.workers);
      const auto dev = LoadExamples(dev_manifest, dev_labels, g.workers);
      std::ofstream log;
      if (!trn_log.empty()) log = OpenOut(trn_log);
      const TrainResult r = Train(train, dev, tc, [&](const EpochLog &e) {
        const std::string line = FormatEpochLog(e);
        std::cerr << line << '\n';
        if (log.is_open()) log << line << '\n' << std::flush;
      });
      SaveCheckpoint(r.model, g.checkpoint);
      std::cerr << "train: best epoch " << r.best_epoch << " -> " << g.checkpoint << '\n';
    } else if (*ev) {
      const std::string path = RequireManifest(g);
      const Manifest m = Manifest::Load(path);
      EvalOptions eo;
      eo.soft_weight = g.soft_weight;
      const auto policies = ParsePolicies(g.policy, &eo.soft_weight);
      eo.rule.lambda_db = g.lambda_db;
      eo.bin_db = ev_bin;
      eo.workers = g.workers;
      std::optional<SwitchModel> model;
      for (Policy p : policies)
        if (NeedsModel(p) && !model) {
          if (g.checkpoint.empty()) throw ConfigError("learned policies need --checkpoint");
          model = LoadCheckpoint(g.checkpoint);
        }
      if (model) eo.model = &*model;
      std::unique_ptr<SeAdapter> se;
      if (!g.se_cmd.empty()) {
        se = MakeSeAdapter(g.se_cmd, AdapterOptions(g));
        eo.se = se.get();
      }
      auto asr = MakeAsrAdapter(g.asr_cmd, AdapterOptions(g), g.seed);
      const auto tables = EvaluatePolicies(m, policies, *asr, eo);
      auto os = OpenOut(ev_out);
      for (const auto &t : tables) WriteEvalTable(t, os);
      if (!ev_md.empty()) OpenOut(ev_md) << RenderEvalTables(tables);
    } else if (*rep) {
      if (rep_tables.empty() && rep_dist.empty())
        throw ConfigError("report needs --tables or --distribution");
      std::ostringstream md;
      if (!rep_tables.empty()) {
        std::vector<EvalTable> all;
        for (const auto &p : rep_tables) {
          auto is = OpenIn(p);
          for (auto &t : ReadEvalTables(is)) all.push_back(std::move(t));
        }
        md << RenderEvalTables(all);
      }
      if (!rep_dist.empty()) {
        auto is = OpenIn(rep_dist);
        if (!rep_tables.empty()) md << '\n';
        md << RenderLabelDistribution(ReadLabelDistribution(is));
      }
      if (rep_out.empty())
        std::cout << md.str();
      else
        OpenOut(rep_out) << md.str();
    } else if (*sse) {
      const Manifest m = Manifest::Load(RequireManifest(g));
      SurrogateSeAdapter se;
      WriteWav(se.Extract(m, m.Find(s_utt),
                          s_interferer ? ExtractRole::kInterferer : ExtractRole::kTarget),
               s_out);
    } else if (*sasr) {
      const Manifest m = Manifest::Load(RequireManifest(g));
      SurrogateAsrAdapter asr(SurrogateConfig{}, g.seed);
      const std::string text = asr.Recognize(m, m.Find(s_utt), ReadWav(s_in)).ToUtf8();
      if (s_out.empty())
        std::cout << text << '\n';
      else
        OpenOut(s_out) << text << '\n';
    }
  } catch (const ConfigError &e) {
    std::cerr << "switchasr: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const AdapterError &e) {
    std::cerr << "switchasr: " << e.what() << '\n';
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "switchasr: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
