// core/include/switchasr/surrogate.h

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

#ifndef SWITCHASR_SURROGATE_H_
#define SWITCHASR_SURROGATE_H_

#include <cstdint>
#include <random>
#include <string>

#include "switchasr/transcript.h"
#include "switchasr/waveform.h"

namespace switchasr {

// Stand-ins for target-speaker extraction and a recognizer, used for offline
// experiments. The enhancer leaves a fixed residual of interference and
// noise and adds a clipping artifact whose strength varies per utterance; the
// recognizer substitutes characters at a rate driven by how far its input is
// from the clean target and by how much of the input error is not a linear
// mix of the sources.

struct SurrogateConfig {
  // Enhancer.
  double residual_gain = 0.1;
  double clip_percentile = 70.0;

  // Artifact strength drawn per utterance by `simulate`:
  //   20 log10(alpha) = center_db + slope * (SIR - SNR) + jitter_db * N(0,1),
  // clipped to at most 0 dB.
  double artifact_center_db = -30.0;
  double artifact_slope = 1.0;
  double artifact_jitter_db = 4.0;

  // Recognizer: r = sigmoid((D + artifact_weight * max(A, artifact_floor_db)
  //                         + offset_db) / slope_db)
  double distortion_floor_db = -80.0;
  double artifact_floor_db = -40.0;
  double artifact_weight = 3.0;
  double offset_db = 128.0;
  double slope_db = 4.0;
};

/// The artifact signal clip(S, theta) - S, theta being the configured
/// percentile of |S|.
Waveform ClipArtifact(const Waveform &target, double percentile);

/// S + g * (I + N) + alpha * ClipArtifact(S).
Waveform SurrogateEnhance(const Waveform &target, const Waveform &interference,
                          const Waveform &noise, double alpha,
                          const SurrogateConfig &cfg = {});

/// Draws alpha for one utterance.
double DrawArtifactStrength(double sir_db, double snr_db, std::mt19937_64 &rng,
                            const SurrogateConfig &cfg = {});

struct DistortionScores {
  double distortion_db = 0.0;  // D: input - S relative to S
  double artifact_db = 0.0;    // A: least-squares residual on [S, I, N] relative to S
  double error_rate = 0.0;     // per-character substitution probability
};

DistortionScores ScoreDistortion(const Waveform &input, const Waveform &target,
                                 const Waveform &interference, const Waveform &noise,
                                 const SurrogateConfig &cfg = {});

/// Deterministic per-utterance generator seeded from (seed, utt_id).
std::mt19937_64 UtteranceRng(std::uint64_t seed, const std::string &utt_id);

/// Substitutes reference character i when u_i < rate, with u_i and the
/// replacement drawn from UtteranceRng(seed, utt_id) regardless of rate, so
/// the error set only grows with rate.
Transcript CorruptTranscript(const Transcript &reference, double rate,
                             std::uint64_t seed, const std::string &utt_id);

}  // namespace switchasr

#endif  // SWITCHASR_SURROGATE_H_
