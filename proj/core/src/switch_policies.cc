// core/src/switch_policies.cc

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

#include "switchasr/switch_policies.h"

#include <cmath>
#include <string>

#include "switchasr/error.h"

namespace switchasr {

std::string_view ChoiceName(Choice c) {
  return c == Choice::kUseObserved ? "observed" : "enhanced";
}

SoftWeight::SoftWeight(double w0) : w0_(w0) {
  if (!(w0 >= 0.0 && w0 <= 1.0))
    throw InvalidInput("soft weight must lie in [0, 1], got " + std::to_string(w0));
}

Decision DecideFromPosterior(const Posterior &p) {
  Decision d;
  d.choice = p.p0 > p.p1 ? Choice::kUseObserved : Choice::kUseEnhanced;
  d.posterior = p;
  return d;
}

std::pair<Decision, Waveform> HardSwitch(const Posterior &p, const Waveform &observed,
                                         const Waveform &enhanced) {
  if (observed.size() != enhanced.size())
    throw InvalidInput("hard switch: length mismatch");
  Decision d = DecideFromPosterior(p);
  return {d, d.UsesObserved() ? observed : enhanced};
}

Waveform SoftSwitch(SoftWeight w, const Waveform &observed, const Waveform &enhanced) {
  if (observed.size() != enhanced.size())
    throw InvalidInput("soft switch: length mismatch");
  // Endpoints return the inputs bit-exactly.
  if (w.w0() == 1.0) return observed;
  if (w.w0() == 0.0) return enhanced;
  return WeightedSum(w.w0(), observed, 1.0 - w.w0(), enhanced);
}

Decision OracleHard(double cer_mixture, double cer_enhanced) {
  Decision d;
  d.choice = cer_mixture < cer_enhanced ? Choice::kUseObserved : Choice::kUseEnhanced;
  return d;
}

Decision OracleRule(double true_sir_db, double true_snr_db, const RuleConfig &cfg) {
  SirSnrEstimate est;
  est.sir_db = true_sir_db;
  est.snr_db = true_snr_db;
  est.source = EstimateSource::kOracle;
  return RuleDecide(est, cfg);
}

std::vector<double> SoftWeightGrid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

OracleSoftResult OracleSoft(const Waveform &observed, const Waveform &enhanced,
                            const Transcript &reference, const Recognizer &asr) {
  OracleSoftResult res;
  bool first = true;
  for (double w : SoftWeightGrid()) {
    const Transcript hyp = asr(SoftSwitch(SoftWeight(w), observed, enhanced));
    const CerStats stats = ScoreCer(reference, hyp);
    const double cer = stats.Rate();
    res.cer_per_weight.push_back(cer);
    if (first || cer < res.best_cer) {
      res.weight = SoftWeight(w);
      res.best_cer = cer;
      res.best_stats = stats;
      first = false;
    }
  }
  return res;
}

}  // namespace switchasr
