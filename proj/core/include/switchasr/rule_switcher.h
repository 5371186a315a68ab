// core/include/switchasr/rule_switcher.h

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

#ifndef SWITCHASR_RULE_SWITCHER_H_
#define SWITCHASR_RULE_SWITCHER_H_

#include <optional>
#include <vector>

#include "switchasr/decision.h"
#include "switchasr/waveform.h"

namespace switchasr {

struct RuleConfig {
  double lambda_db = 10.0;
  /// Frames more than this far above the utterance's low-percentile level are
  /// speech-active.
  double vad_energy_floor_db = 10.0;
  int vad_hangover_frames = 3;
  double vad_percentile = 10.0;
  /// Used only when the energy contour is flat (spread below the floor): the
  /// whole utterance is active iff its median level exceeds this, in dB
  /// relative to a full-scale square wave.
  double vad_absolute_db = -40.0;
};

enum class EstimateSource { kEstimated, kOracle };

struct SirSnrEstimate {
  double sir_db = 0.0;
  double snr_db = 0.0;
  double noise_power = 0.0;
  EstimateSource source = EstimateSource::kEstimated;
};

/// Per-frame level in dB: 10 log10(mean square + 1e-12), on the feature
/// framing (256-sample window, 128 hop).
std::vector<double> FrameLevelsDb(const Waveform &w);

/// Energy VAD on the feature framing. Frame is active iff its level exceeds
/// the utterance's `vad_percentile` level plus `vad_energy_floor_db`; active
/// runs are extended by `vad_hangover_frames` on both sides.
std::vector<bool> EnergyVad(const Waveform &w, const RuleConfig &cfg = {});

/// Utterance-scale noise power: mean per-sample power of the frames inactive
/// in both masks, times the number of samples. Throws EstimationUnavailable if
/// no frame is inactive in both.
double EstimateNoisePower(const Waveform &mixture,
                          const std::vector<bool> &target_mask,
                          const std::vector<bool> &interf_mask);

SirSnrEstimate EstimateSirSnr(const Waveform &enh_target,
                              const Waveform &enh_interf, double noise_power);

/// UseObserved iff sir - snr >= lambda.
Decision RuleDecide(const SirSnrEstimate &est, const RuleConfig &cfg = {});

struct RuleOutcome {
  Decision decision;
  std::optional<SirSnrEstimate> estimate;  // empty when the fallback fired
};

/// VAD on both extracted signals, noise power from the mixture, SIR/SNR
/// estimate and threshold rule. Falls back to UseEnhanced when the noise power
/// cannot be estimated or is zero.
RuleOutcome RuleSwitch(const Waveform &mixture, const Waveform &enh_target,
                       const Waveform &enh_interf, const RuleConfig &cfg = {});

}  // namespace switchasr

#endif  // SWITCHASR_RULE_SWITCHER_H_
