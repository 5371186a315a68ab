// core/src/rule_switcher.cc

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

#include "switchasr/rule_switcher.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "switchasr/error.h"
#include "switchasr/features.h"

namespace switchasr {

std::vector<double> FrameLevelsDb(const Waveform &w) {
  const FrameConfig fc;
  const int frames = NumFrames(w.size(), fc);
  if (frames == 0)
    throw InvalidInput("vad: waveform shorter than one frame (" +
                       std::to_string(w.size()) + " samples)");
  std::vector<double> levels(frames);
  const auto s = w.samples();
  for (int f = 0; f < frames; ++f) {
    double e = 0.0;
    for (int i = 0; i < fc.window; ++i) {
      const double v = s[static_cast<std::size_t>(f) * fc.hop + i];
      e += v * v;
    }
    levels[f] = 10.0 * std::log10(e / fc.window + 1e-12);
  }
  return levels;
}

std::vector<bool> EnergyVad(const Waveform &w, const RuleConfig &cfg) {
  if (cfg.vad_hangover_frames < 0) throw InvalidInput("vad: negative hangover");
  const std::vector<double> levels = FrameLevelsDb(w);
  const std::size_t n = levels.size();

  std::vector<double> sorted = levels;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::floor(cfg.vad_percentile / 100.0 * static_cast<double>(n - 1)));
  const double low = sorted[std::min(rank, n - 1)];
  const double spread = sorted.back() - low;

  std::vector<bool> raw(n);
  if (spread < cfg.vad_energy_floor_db) {
    const bool active = sorted[(n - 1) / 2] > cfg.vad_absolute_db;
    std::fill(raw.begin(), raw.end(), active);
    return raw;
  }
  const double threshold = low + cfg.vad_energy_floor_db;
  for (std::size_t f = 0; f < n; ++f) raw[f] = levels[f] > threshold;

  std::vector<bool> mask(n, false);
  const auto h = static_cast<std::ptrdiff_t>(cfg.vad_hangover_frames);
  for (std::size_t f = 0; f < n; ++f) {
    if (!raw[f]) continue;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, std::ptrdiff_t(f) - h);
    const std::ptrdiff_t hi =
        std::min<std::ptrdiff_t>(std::ptrdiff_t(n) - 1, std::ptrdiff_t(f) + h);
    for (std::ptrdiff_t g = lo; g <= hi; ++g) mask[g] = true;
  }
  return mask;
}

double EstimateNoisePower(const Waveform &mixture,
                          const std::vector<bool> &target_mask,
                          const std::vector<bool> &interf_mask) {
  const FrameConfig fc;
  const std::size_t frames = static_cast<std::size_t>(NumFrames(mixture.size(), fc));
  if (frames == 0) throw InvalidInput("noise estimate: mixture shorter than a frame");
  if (target_mask.size() != frames || interf_mask.size() != frames)
    throw InvalidInput("noise estimate: mask length does not match frame count");
  const auto s = mixture.samples();
  double acc = 0.0;
  std::size_t used = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (target_mask[f] || interf_mask[f]) continue;
    double e = 0.0;
    for (int i = 0; i < fc.window; ++i) {
      const double v = s[f * fc.hop + i];
      e += v * v;
    }
    acc += e / fc.window;
    ++used;
  }
  if (used == 0)
    throw EstimationUnavailable("no frame is inactive for both speakers");
  return acc / static_cast<double>(used) * static_cast<double>(mixture.size());
}

SirSnrEstimate EstimateSirSnr(const Waveform &enh_target,
                              const Waveform &enh_interf, double noise_power) {
  const double ps = Power(enh_target);
  SirSnrEstimate est;
  est.sir_db = LevelDb(ps, Power(enh_interf));
  est.snr_db = LevelDb(ps, noise_power);
  est.noise_power = noise_power;
  est.source = EstimateSource::kEstimated;
  return est;
}

Decision RuleDecide(const SirSnrEstimate &est, const RuleConfig &cfg) {
  Decision d;
  d.choice = est.sir_db - est.snr_db >= cfg.lambda_db ? Choice::kUseObserved
                                                      : Choice::kUseEnhanced;
  return d;
}

RuleOutcome RuleSwitch(const Waveform &mixture, const Waveform &enh_target,
                       const Waveform &enh_interf, const RuleConfig &cfg) {
  RuleOutcome out;
  try {
    const double noise = EstimateNoisePower(mixture, EnergyVad(enh_target, cfg),
                                            EnergyVad(enh_interf, cfg));
    const SirSnrEstimate est = EstimateSirSnr(enh_target, enh_interf, noise);
    out.decision = RuleDecide(est, cfg);
    out.estimate = est;
  } catch (const EstimationUnavailable &) {
    out.decision.choice = Choice::kUseEnhanced;
  } catch (const UndefinedRatio &) {
    out.decision.choice = Choice::kUseEnhanced;
  }
  return out;
}

}  // namespace switchasr
