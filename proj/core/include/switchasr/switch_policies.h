// core/include/switchasr/switch_policies.h

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

#ifndef SWITCHASR_SWITCH_POLICIES_H_
#define SWITCHASR_SWITCH_POLICIES_H_

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "switchasr/decision.h"
#include "switchasr/rule_switcher.h"
#include "switchasr/transcript.h"
#include "switchasr/waveform.h"

namespace switchasr {

/// Weight on the observed mixture in a soft switch; always in [0, 1].
class SoftWeight {
 public:
  SoftWeight() = default;
  explicit SoftWeight(double w0);
  double w0() const { return w0_; }

 private:
  double w0_ = 0.0;
};

/// Observed iff p0 > p1; a tie goes to the enhanced signal.
Decision DecideFromPosterior(const Posterior &p);

/// Returns the decision and the selected signal (Y or S_hat).
std::pair<Decision, Waveform> HardSwitch(const Posterior &p, const Waveform &observed,
                                         const Waveform &enhanced);

/// w0 * Y + (1 - w0) * S_hat.
Waveform SoftSwitch(SoftWeight w, const Waveform &observed, const Waveform &enhanced);

/// Observed iff its CER is strictly lower.
Decision OracleHard(double cer_mixture, double cer_enhanced);

/// Threshold rule on ground-truth SIR/SNR.
Decision OracleRule(double true_sir_db, double true_snr_db, const RuleConfig &cfg = {});

/// Weights searched by the soft oracle: 0.0, 0.1, ..., 1.0.
std::vector<double> SoftWeightGrid();

struct OracleSoftResult {
  SoftWeight weight;
  double best_cer = 0.0;
  CerStats best_stats;
  std::vector<double> cer_per_weight;  // aligned with SoftWeightGrid()
};

using Recognizer = std::function<Transcript(const Waveform &)>;

/// Recognizes the soft mix for every grid weight in ascending order and keeps
/// the lowest-CER weight; ties go to the smaller weight.
OracleSoftResult OracleSoft(const Waveform &observed, const Waveform &enhanced,
                            const Transcript &reference, const Recognizer &asr);

}  // namespace switchasr

#endif  // SWITCHASR_SWITCH_POLICIES_H_
