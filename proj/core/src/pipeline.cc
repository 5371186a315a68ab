// core/src/pipeline.cc

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

#include "switchasr/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <map>
#include <optional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "switchasr/error.h"
#include "switchasr/features.h"
#include "switchasr/switch_policies.h"
#include "switchasr/wav_io.h"

namespace switchasr {

namespace {

namespace fs = std::filesystem;

double Bin(double v, double bin_db) { return std::round(v / bin_db) * bin_db + 0.0; }

std::string Fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, '\t')) out.push_back(f);
  return out;
}

std::mt19937_64 IndexRng(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Waveform Load(const Manifest &m, const std::string &stored) { return ReadWav(m.Resolve(stored)); }

void RequireEnhanced(const Manifest &m) {
  for (const auto &r : m.records())
    if (!r.enhanced)
      throw ConfigError("utterance '" + r.utt_id + "' has no enhanced signal; run enhance first");
}

}  // namespace

void ParallelFor(std::size_t n, int workers, const std::function<void(std::size_t)> &fn) {
  const std::size_t nthreads =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1)));
  std::vector<std::exception_ptr> errors(n);
  if (nthreads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next++;
          if (i >= n || failed) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    }
    for (auto &th : pool) th.join();
  }
  for (auto &e : errors)
    if (e) std::rethrow_exception(e);
}

int SirSnrSampling::Total() const {
  if (mode == Mode::kGrid)
    return static_cast<int>(sir_db.size() * snr_db.size()) * per_cell;
  return count;
}

Manifest SimulateCorpus(const SpeechPool &speech, const NoisePool &noise,
                        const SimulateOptions &opts) {
  const auto &smp = opts.sampling;
  if (smp.mode == SirSnrSampling::Mode::kGrid &&
      (smp.sir_db.empty() || smp.snr_db.empty() || smp.per_cell < 1))
    throw ConfigError("empty SIR/SNR grid");
  if (smp.mode == SirSnrSampling::Mode::kUniform && (smp.count < 1 || !(smp.lo_db <= smp.hi_db)))
    throw ConfigError("bad uniform SIR/SNR range");
  if (!(opts.overlap_ratio > 0.0 && opts.overlap_ratio <= 1.0))
    throw ConfigError("overlap ratio outside (0, 1]");
  if (opts.out_dir.empty()) throw ConfigError("no output directory");

  const fs::path out(opts.out_dir);
  fs::create_directories(out / "wav");
  fs::create_directories(out / "enroll");
  Manifest manifest(fs::absolute(out));
  std::vector<std::string> enroll_paths;
  for (int s = 0; s < speech.num_speakers(); ++s) {
    const fs::path p = out / "enroll" / (speech.speaker_id(s) + ".wav");
    WriteWav(speech.enrollment(s), p.string());
    enroll_paths.push_back(manifest.Relativize(p.string()));
  }

  const int total = smp.Total();
  std::vector<ManifestRecord> records(static_cast<std::size_t>(total));
  ParallelFor(records.size(), opts.workers, [&](std::size_t k) {
    std::mt19937_64 rng = IndexRng(opts.seed, k);
    double sir = 0.0, snr = 0.0;
    if (smp.mode == SirSnrSampling::Mode::kGrid) {
      const std::size_t cell = k / static_cast<std::size_t>(smp.per_cell);
      sir = smp.sir_db[cell / smp.snr_db.size()];
      snr = smp.snr_db[cell % smp.snr_db.size()];
    } else {
      std::uniform_real_distribution<double> u(smp.lo_db, smp.hi_db);
      sir = u(rng);
      snr = u(rng);
    }
    std::uniform_int_distribution<int> spk(0, speech.num_speakers() - 1);
    const int t = spk(rng);
    int j = spk(rng);
    while (j == t) j = spk(rng);

    SpeechSample tgt = speech.Draw(t, rng);
    const std::size_t len = tgt.audio.size();
    Waveform interf = LoopToLength(speech.Draw(j, rng).audio, len);
    if (opts.overlap_ratio < 1.0) {
      const auto active = static_cast<std::size_t>(std::ceil(opts.overlap_ratio * len));
      std::uniform_int_distribution<std::size_t> off(0, len - active);
      const std::size_t start = off(rng);
      for (std::size_t i = 0; i < len; ++i)
        if (i < start || i >= start + active) interf[i] = 0.0;
    }
    const Waveform nz = noise.Draw(len, rng);
    MixtureBundle b = MixAt(tgt.audio, interf, nz, sir, snr);

    const double peak = std::max({b.observed.PeakAbs(), b.target.PeakAbs(),
                                  b.interference.PeakAbs(), b.noise.PeakAbs()});
    const double gain = peak > opts.peak_limit ? opts.peak_limit / peak : 1.0;
    const Waveform s = Quantize16(b.target.Scaled(gain));
    const Waveform i = Quantize16(b.interference.Scaled(gain));
    const Waveform n = Quantize16(b.noise.Scaled(gain));
    const Waveform y = Quantize16(b.observed.Scaled(gain));

    char id[64];
    std::snprintf(id, sizeof(id), "%s_%06zu", opts.prefix.c_str(), k);
    ManifestRecord r;
    r.utt_id = id;
    r.target_speaker = speech.speaker_id(t);
    r.interferer_speaker = speech.speaker_id(j);
    auto put = [&](const Waveform &w, const char *suffix) {
      const fs::path p = out / "wav" / (r.utt_id + suffix);
      WriteWav(w, p.string());
      return manifest.Relativize(p.string());
    };
    r.mixture = put(y, "_mix.wav");
    r.target = put(s, "_target.wav");
    r.interference = put(i, "_interf.wav");
    r.noise = put(n, "_noise.wav");
    r.enrollment_target = enroll_paths[static_cast<std::size_t>(t)];
    if (opts.interferer_enrollment) r.enrollment_interferer = enroll_paths[static_cast<std::size_t>(j)];
    r.transcript = tgt.transcript;
    r.true_sir_db = LevelDb(Power(s), Power(i));
    r.true_snr_db = LevelDb(Power(s), Power(n));
    r.peak_gain = gain;
    r.artifact_strength = DrawArtifactStrength(sir, snr, rng, opts.surrogate);
    records[k] = std::move(r);
  });
  manifest.records() = std::move(records);
  return manifest;
}

void EnhanceCorpus(Manifest *manifest, SeAdapter &se, const EnhanceOptions &opts) {
  const fs::path base = manifest->base_dir();
  fs::create_directories(base / "enhanced");
  if (opts.interferer) fs::create_directories(base / "enhanced_interferer");
  auto &recs = manifest->records();
  ParallelFor(recs.size(), opts.workers, [&](std::size_t k) {
    ManifestRecord &r = recs[k];
    const fs::path p = base / "enhanced" / (r.utt_id + ".wav");
    WriteWav(se.Extract(*manifest, r, ExtractRole::kTarget), p.string());
    r.enhanced = manifest->Relativize(p.string());
    if (opts.interferer && r.enrollment_interferer) {
      const fs::path q = base / "enhanced_interferer" / (r.utt_id + ".wav");
      WriteWav(se.Extract(*manifest, r, ExtractRole::kInterferer), q.string());
      r.enhanced_interferer = manifest->Relativize(q.string());
    }
  });
}

std::vector<Hypotheses> RecognizeCorpus(const Manifest &manifest, AsrAdapter &asr, int workers) {
  RequireEnhanced(manifest);
  const auto &recs = manifest.records();
  std::vector<Hypotheses> out(recs.size());
  ParallelFor(recs.size(), workers, [&](std::size_t k) {
    const ManifestRecord &r = recs[k];
    out[k].utt_id = r.utt_id;
    out[k].mixture = asr.Recognize(manifest, r, Load(manifest, r.mixture));
    out[k].enhanced = asr.Recognize(manifest, r, Load(manifest, *r.enhanced));
  });
  return out;
}

void WriteHypotheses(const std::vector<Hypotheses> &hyps, std::ostream &os) {
  for (const auto &h : hyps)
    os << h.utt_id << '\t' << h.mixture.ToUtf8() << '\t' << h.enhanced.ToUtf8() << '\n';
}

std::vector<Hypotheses> ReadHypotheses(std::istream &is) {
  std::vector<Hypotheses> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    // Empty hypotheses leave empty fields, so split keeps trailing ones.
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw FormatError("hypothesis line " + std::to_string(lineno) + ": expected 3 fields");
    out.push_back({line.substr(0, t1),
                   Transcript::FromUtf8(line.substr(t1 + 1, t2 - t1 - 1)),
                   Transcript::FromUtf8(line.substr(t2 + 1))});
  }
  return out;
}

std::vector<LabeledRecord> LabelCorpus(const Manifest &manifest,
                                       const std::vector<Hypotheses> &hyps) {
  std::map<std::string, const Hypotheses *> by_id;
  for (const auto &h : hyps) by_id[h.utt_id] = &h;
  std::vector<LabeledRecord> out;
  for (const auto &r : manifest.records()) {
    auto it = by_id.find(r.utt_id);
    if (it == by_id.end()) throw ConfigError("no hypotheses for utterance '" + r.utt_id + "'");
    const Transcript ref = Transcript::FromUtf8(r.transcript);
    LabeledRecord lr;
    lr.utt_id = r.utt_id;
    lr.cer_mixture = Cer(ref, it->second->mixture);
    lr.cer_enhanced = Cer(ref, it->second->enhanced);
    lr.label = MakeLabelFromCers(lr.cer_mixture, lr.cer_enhanced);
    out.push_back(lr);
  }
  return out;
}

std::vector<TrainingExample> BuildExamples(const Manifest &manifest,
                                           const std::vector<LabeledRecord> &labels,
                                           int workers) {
  const std::vector<LabeledRecord> kept = FilterTies(labels);
  std::vector<const ManifestRecord *> recs;
  for (const auto &l : kept) {
    const ManifestRecord &r = manifest.Find(l.utt_id);
    if (!r.enhanced) throw ConfigError("utterance '" + r.utt_id + "' has no enhanced signal");
    recs.push_back(&r);
  }
  std::vector<TrainingExample> out(kept.size());
  ParallelFor(kept.size(), workers, [&](std::size_t k) {
    out[k].utt_id = kept[k].utt_id;
    out[k].label = kept[k].label;
    out[k].feats = PairFeatures(Load(manifest, recs[k]->mixture), Load(manifest, *recs[k]->enhanced));
  });
  return out;
}

TrainingSet BuildTrainingSet(Manifest *manifest, SeAdapter *se, AsrAdapter &asr, int workers) {
  auto &recs = manifest->records();
  if (!se) RequireEnhanced(*manifest);
  const fs::path base = manifest->base_dir();
  std::vector<std::optional<Hypotheses>> hyps(recs.size());
  std::vector<std::optional<AdapterFailure>> fails(recs.size());
  bool any_missing = false;
  for (const auto &r : recs) any_missing |= !r.enhanced;
  if (any_missing) fs::create_directories(base / "enhanced");
  ParallelFor(recs.size(), workers, [&](std::size_t k) {
    ManifestRecord &r = recs[k];
    try {
      if (!r.enhanced) {
        const fs::path p = base / "enhanced" / (r.utt_id + ".wav");
        WriteWav(se->Extract(*manifest, r, ExtractRole::kTarget), p.string());
        r.enhanced = manifest->Relativize(p.string());
      }
      hyps[k] = Hypotheses{r.utt_id, asr.Recognize(*manifest, r, Load(*manifest, r.mixture)),
                           asr.Recognize(*manifest, r, Load(*manifest, *r.enhanced))};
    } catch (const AdapterError &e) {
      fails[k] = AdapterFailure{r.utt_id, e.what()};
    }
  });

  TrainingSet out;
  Manifest ok(manifest->base_dir());
  std::vector<Hypotheses> ok_hyps;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (fails[k]) {
      out.failures.push_back(*fails[k]);
      continue;
    }
    ok.records().push_back(recs[k]);
    ok_hyps.push_back(*hyps[k]);
  }
  out.labels = LabelCorpus(ok, ok_hyps);
  out.examples = BuildExamples(ok, out.labels, workers);
  return out;
}

std::vector<LabelCell> LabelDistribution(const Manifest &manifest,
                                         const std::vector<LabeledRecord> &labels,
                                         double bin_db) {
  std::map<std::pair<double, double>, LabelCell> cells;
  for (const auto &l : labels) {
    const ManifestRecord &r = manifest.Find(l.utt_id);
    const double sir = Bin(r.true_sir_db, bin_db), snr = Bin(r.true_snr_db, bin_db);
    LabelCell &c = cells[{sir, snr}];
    c.sir_db = sir;
    c.snr_db = snr;
    if (l.label.tie)
      ++c.ties;
    else if (l.label.bit() == 0)
      ++c.mixture_better;
    else
      ++c.enhanced_better;
  }
  std::vector<LabelCell> out;
  for (auto &[k, c] : cells) out.push_back(c);
  return out;
}

void WriteLabelDistribution(const std::vector<LabelCell> &cells, std::ostream &os) {
  os << "sir_db\tsnr_db\tmixture_better\tenhanced_better\tties\n";
  for (const auto &c : cells)
    os << Fmt("%g", c.sir_db) << '\t' << Fmt("%g", c.snr_db) << '\t' << c.mixture_better << '\t'
       << c.enhanced_better << '\t' << c.ties << '\n';
}

std::vector<LabelCell> ReadLabelDistribution(std::istream &is) {
  std::vector<LabelCell> out;
  std::string line;
  std::getline(is, line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 5) throw FormatError("bad label distribution line");
    try {
      out.push_back({std::stod(f[0]), std::stod(f[1]), std::stoi(f[2]), std::stoi(f[3]),
                     std::stoi(f[4])});
    } catch (const std::logic_error &) {
      throw FormatError("bad label distribution line");
    }
  }
  return out;
}

std::string RenderLabelDistribution(const std::vector<LabelCell> &cells) {
  std::set<double> sirs, snrs;
  std::map<std::pair<double, double>, const LabelCell *> at;
  for (const auto &c : cells) {
    sirs.insert(c.sir_db);
    snrs.insert(c.snr_db);
    at[{c.sir_db, c.snr_db}] = &c;
  }
  std::ostringstream os;
  os << "Share of utterances where the mixture is better (untied count in brackets; ties "
        "separate).\n\n| SIR \\ SNR |";
  for (double n : snrs) os << ' ' << Fmt("%g dB", n) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < snrs.size(); ++i) os << "---|";
  os << '\n';
  for (double s : sirs) {
    os << "| " << Fmt("%g dB", s) << " |";
    for (double n : snrs) {
      auto it = at.find({s, n});
      if (it == at.end()) {
        os << " - |";
        continue;
      }
      const LabelCell &c = *it->second;
      const int untied = c.mixture_better + c.enhanced_better;
      os << ' ' << (untied ? Fmt("%.2f", static_cast<double>(c.mixture_better) / untied) : "-")
         << " [" << untied << ", " << c.ties << " ties] |";
    }
    os << '\n';
  }
  return os.str();
}

std::string_view PolicyName(Policy p) {
  switch (p) {
    case Policy::kMixture: return "mixture";
    case Policy::kEnhanced: return "enhanced";
    case Policy::kRule: return "rule";
    case Policy::kRuleOracle: return "rule-oracle";
    case Policy::kLearnedHard: return "learned-hard";
    case Policy::kLearnedSoft: return "learned-soft";
    case Policy::kFixedSoft: return "fixed-soft";
    case Policy::kOracleHard: return "oracle-hard";
    case Policy::kOracleSoft: return "oracle-soft";
  }
  return "?";
}

std::vector<Policy> AllPolicies() {
  return {Policy::kMixture,     Policy::kEnhanced,    Policy::kRule,
          Policy::kRuleOracle,  Policy::kLearnedHard, Policy::kLearnedSoft,
          Policy::kFixedSoft,   Policy::kOracleHard,  Policy::kOracleSoft};
}

Policy ParsePolicy(std::string_view name, double *weight) {
  for (Policy p : AllPolicies())
    if (PolicyName(p) == name) return p;
  constexpr std::string_view kFixed = "fixed-soft(";
  if (name.substr(0, kFixed.size()) == kFixed && name.size() > kFixed.size() + 1 &&
      name.back() == ')') {
    const std::string arg(name.substr(kFixed.size(), name.size() - kFixed.size() - 1));
    std::size_t pos = 0;
    double w = -1.0;
    try {
      w = std::stod(arg, &pos);
    } catch (const std::logic_error &) {
      pos = 0;
    }
    if (pos != arg.size() || !(w >= 0.0 && w <= 1.0))
      throw ConfigError("bad fixed-soft weight in '" + std::string(name) + "'");
    if (weight) *weight = w;
    return Policy::kFixedSoft;
  }
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

bool NeedsModel(Policy p) { return p == Policy::kLearnedHard || p == Policy::kLearnedSoft; }

std::vector<EvalTable> EvaluatePolicies(const Manifest &manifest,
                                        const std::vector<Policy> &policies, AsrAdapter &asr,
                                        const EvalOptions &opts) {
  RequireEnhanced(manifest);
  bool need_model = false, need_rule = false;
  for (Policy p : policies) {
    need_model |= NeedsModel(p);
    need_rule |= p == Policy::kRule;
  }
  if (need_model && !opts.model) throw ConfigError("learned policy needs a checkpoint");
  if (need_rule && !opts.se)
    for (const auto &r : manifest.records())
      if (r.enrollment_interferer && !r.enhanced_interferer)
        throw ConfigError("utterance '" + r.utt_id +
                          "' has no extracted interferer and no SE adapter was given");
  const SoftWeight fixed_weight(opts.soft_weight);

  const auto &recs = manifest.records();
  const std::size_t n = recs.size();

  // Posteriors first, in batches.
  std::vector<Posterior> post(n);
  if (need_model) {
    std::vector<FeatureMatrix> feats(n);
    ParallelFor(n, opts.workers, [&](std::size_t k) {
      feats[k] = PairFeatures(Load(manifest, recs[k].mixture), Load(manifest, *recs[k].enhanced));
    });
    post = opts.model->PredictBatch(feats);
  }

  std::vector<std::vector<UtteranceResult>> results(policies.size(),
                                                    std::vector<UtteranceResult>(n));
  std::vector<int> oracle_bit(n, -1);  // -1 = tie
  ParallelFor(n, opts.workers, [&](std::size_t k) {
    const ManifestRecord &r = recs[k];
    const Waveform y = Load(manifest, r.mixture);
    const Waveform s_hat = Load(manifest, *r.enhanced);
    const Transcript ref = Transcript::FromUtf8(r.transcript);
    auto recognize = [&](const Waveform &w) { return asr.Recognize(manifest, r, w); };
    const CerStats cy = ScoreCer(ref, recognize(y));
    const CerStats cs = ScoreCer(ref, recognize(s_hat));
    if (cy.errors != cs.errors) oracle_bit[k] = cy.errors < cs.errors ? 0 : 1;

    for (std::size_t p = 0; p < policies.size(); ++p) {
      UtteranceResult &u = results[p][k];
      u.utt_id = r.utt_id;
      u.sir_db = r.true_sir_db;
      u.snr_db = r.true_snr_db;
      auto hard = [&](const Decision &d) {
        u.weight_observed = d.UsesObserved() ? 1.0 : 0.0;
        u.stats = d.UsesObserved() ? cy : cs;
      };
      auto soft = [&](SoftWeight w) {
        u.weight_observed = w.w0();
        u.stats = ScoreCer(ref, recognize(SoftSwitch(w, y, s_hat)));
      };
      switch (policies[p]) {
        case Policy::kMixture:
          hard(Decision{Choice::kUseObserved, {}});
          break;
        case Policy::kEnhanced:
          hard(Decision{Choice::kUseEnhanced, {}});
          break;
        case Policy::kOracleHard:
          hard(OracleHard(cy.Rate(), cs.Rate()));
          break;
        case Policy::kRuleOracle:
          hard(OracleRule(r.true_sir_db, r.true_snr_db, opts.rule));
          break;
        case Policy::kRule: {
          if (!r.enrollment_interferer) {
            u.excluded = true;
            break;
          }
          const Waveform i_hat = r.enhanced_interferer
                                     ? Load(manifest, *r.enhanced_interferer)
                                     : opts.se->Extract(manifest, r, ExtractRole::kInterferer);
          hard(RuleSwitch(y, s_hat, i_hat, opts.rule).decision);
          break;
        }
        case Policy::kLearnedHard:
          hard(DecideFromPosterior(post[k]));
          break;
        case Policy::kLearnedSoft:
          soft(SoftWeight(std::clamp(post[k].p0, 0.0, 1.0)));
          break;
        case Policy::kFixedSoft:
          soft(fixed_weight);
          break;
        case Policy::kOracleSoft: {
          const OracleSoftResult o = OracleSoft(y, s_hat, ref, recognize);
          u.weight_observed = o.weight.w0();
          u.stats = o.best_stats;
          break;
        }
      }
    }
  });

  std::vector<EvalTable> tables;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    EvalTable t;
    t.policy = policies[p];
    std::map<std::pair<double, double>, CerStats> cells;
    const bool is_hard = policies[p] == Policy::kRule || policies[p] == Policy::kRuleOracle ||
                         policies[p] == Policy::kLearnedHard || policies[p] == Policy::kOracleHard;
    int agree = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const UtteranceResult &u = results[p][k];
      if (u.excluded) {
        ++t.excluded;
        continue;
      }
      cells[{Bin(u.sir_db, opts.bin_db), Bin(u.snr_db, opts.bin_db)}] += u.stats;
      t.total += u.stats;
      if (is_hard && oracle_bit[k] >= 0) {
        ++t.accuracy_count;
        agree += (u.weight_observed > 0.5 ? 0 : 1) == oracle_bit[k];
      }
    }
    if (is_hard && t.accuracy_count > 0)
      t.accuracy = static_cast<double>(agree) / t.accuracy_count;
    for (auto &[key, st] : cells) t.cells.push_back({key.first, key.second, st});
    t.utterances = std::move(results[p]);
    tables.push_back(std::move(t));
  }
  return tables;
}

void WriteEvalTable(const EvalTable &t, std::ostream &os) {
  const std::string name(PolicyName(t.policy));
  auto row = [&](const std::string &sir, const std::string &snr, const CerStats &st) {
    os << name << '\t' << sir << '\t' << snr << '\t' << st.errors << '\t' << st.ref_length << '\t'
       << (st.ref_length ? Fmt("%.6f", st.Rate()) : "nan") << '\n';
  };
  for (const auto &c : t.cells) row(Fmt("%g", c.sir_db), Fmt("%g", c.snr_db), c.stats);
  row("all", "all", t.total);
  if (t.accuracy)
    os << "#accuracy\t" << name << '\t' << Fmt("%.6f", *t.accuracy) << '\t' << t.accuracy_count
       << '\n';
  if (t.excluded) os << "#excluded\t" << name << '\t' << t.excluded << '\n';
}

std::vector<EvalTable> ReadEvalTables(std::istream &is) {
  std::vector<EvalTable> tables;
  auto table_for = [&](Policy p) -> EvalTable & {
    for (auto &t : tables)
      if (t.policy == p) return t;
    tables.emplace_back();
    tables.back().policy = p;
    return tables.back();
  };
  std::string line;
  try {
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto f = SplitTabs(line);
      if (f[0] == "#accuracy" && f.size() == 4) {
        EvalTable &t = table_for(ParsePolicy(f[1]));
        t.accuracy = std::stod(f[2]);
        t.accuracy_count = std::stoi(f[3]);
        continue;
      }
      if (f[0] == "#excluded" && f.size() == 3) {
        table_for(ParsePolicy(f[1])).excluded = std::stoi(f[2]);
        continue;
      }
      if (f.size() != 6) throw FormatError("bad evaluation line '" + line + "'");
      EvalTable &t = table_for(ParsePolicy(f[0]));
      CerStats st{std::stoul(f[3]), std::stoul(f[4])};
      if (f[1] == "all")
        t.total = st;
      else
        t.cells.push_back({std::stod(f[1]), std::stod(f[2]), st});
    }
  } catch (const std::logic_error &) {
    throw FormatError("bad evaluation line '" + line + "'");
  } catch (const ConfigError &e) {
    throw FormatError(e.what());
  }
  return tables;
}

std::string RenderEvalTables(const std::vector<EvalTable> &tables) {
  std::set<std::pair<double, double>> bins;
  for (const auto &t : tables)
    for (const auto &c : t.cells) bins.insert({c.sir_db, c.snr_db});
  std::ostringstream os;
  os << "CER (%) by SIR/SNR bin (dB).\n\n| policy |";
  for (const auto &[s, n] : bins) os << ' ' << Fmt("%g", s) << '/' << Fmt("%g", n) << " |";
  os << " avg | acc |\n|---|";
  for (std::size_t i = 0; i < bins.size() + 2; ++i) os << "---|";
  os << '\n';
  for (const auto &t : tables) {
    os << "| " << PolicyName(t.policy) << " |";
    for (const auto &b : bins) {
      auto it = std::find_if(t.cells.begin(), t.cells.end(), [&](const EvalCell &c) {
        return c.sir_db == b.first && c.snr_db == b.second;
      });
      os << ' '
         << (it != t.cells.end() && it->stats.ref_length ? Fmt("%.1f", 100.0 * it->stats.Rate())
                                                          : "-")
         << " |";
    }
    os << ' ' << (t.total.ref_length ? Fmt("%.1f", 100.0 * t.total.Rate()) : "-") << " | "
       << (t.accuracy ? Fmt("%.3f", *t.accuracy) : "-") << " |\n";
  }
  return os.str();
}

}  // namespace switchasr
