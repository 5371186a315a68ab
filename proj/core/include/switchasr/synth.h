// core/include/switchasr/synth.h

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

#ifndef SWITCHASR_SYNTH_H_
#define SWITCHASR_SYNTH_H_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "switchasr/waveform.h"

namespace switchasr {

// Desk-scale stand-ins for speech and noise corpora: formant-synthesized
// "speech" with syllable-like bursts and pauses, and coloured stationary
// noise.

struct SpeakerProfile {
  std::string id;
  double f0_hz = 120.0;
  double formant_scale = 1.0;
  double tilt = 0.9;  // one-pole glottal low-pass coefficient
};

struct SynthConfig {
  std::size_t min_samples = 3200;
  std::size_t max_samples = 4800;
  std::size_t enrollment_samples = 8000;
  int min_transcript_chars = 24;
  int max_transcript_chars = 40;
  double rms = 0.05;
};

SpeakerProfile RandomSpeaker(std::string id, std::mt19937_64 &rng);

/// Voiced syllables through a three-formant resonator cascade with short
/// pauses between some syllables and silence at both ends. Normalized to
/// cfg.rms.
Waveform SynthesizeSpeech(const SpeakerProfile &spk, std::size_t length,
                          std::mt19937_64 &rng, double rms = 0.05);

/// Gaussian noise through a random one-pole colouring filter, normalized to
/// `rms`.
Waveform SynthesizeNoise(std::size_t length, std::mt19937_64 &rng, double rms = 0.05);

/// Random hiragana string.
std::string RandomTranscript(int length, std::mt19937_64 &rng);

struct SpeechSample {
  Waveform audio;
  std::string transcript;
};

/// Speakers with an enrollment recording each; draws utterances either from
/// files or by synthesis.
class SpeechPool {
 public:
  /// `num_speakers` synthetic speakers; every draw synthesizes a new
  /// utterance with a random transcript.
  static SpeechPool Synthetic(int num_speakers, std::uint64_t seed,
                              const SynthConfig &cfg = {});

  /// `dir/<speaker>/<name>.wav` with `<name>.txt` transcripts. The first
  /// utterance of each speaker (sorted by name) is its enrollment and is never
  /// drawn as a target.
  static SpeechPool FromDirectory(const std::string &dir);

  int num_speakers() const { return static_cast<int>(speakers_.size()); }
  const std::string &speaker_id(int s) const { return speakers_.at(s).id; }
  const Waveform &enrollment(int s) const { return speakers_.at(s).enrollment; }

  SpeechSample Draw(int speaker, std::mt19937_64 &rng) const;

 private:
  struct Speaker {
    std::string id;
    SpeakerProfile profile;
    Waveform enrollment;
    std::vector<SpeechSample> utterances;  // empty for synthetic speakers
  };
  std::vector<Speaker> speakers_;
  SynthConfig cfg_;
  bool synthetic_ = false;
};

class NoisePool {
 public:
  static NoisePool Synthetic(const SynthConfig &cfg = {});
  /// Every `*.wav` in `dir`.
  static NoisePool FromDirectory(const std::string &dir);

  /// A noise segment of exactly `length` samples (random file and offset,
  /// looped when the file is short).
  Waveform Draw(std::size_t length, std::mt19937_64 &rng) const;

 private:
  std::vector<Waveform> files_;
  SynthConfig cfg_;
  bool synthetic_ = false;
};

}  // namespace switchasr

#endif  // SWITCHASR_SYNTH_H_
