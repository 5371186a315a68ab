// core/src/synth.cc

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

#include "switchasr/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "switchasr/error.h"
#include "switchasr/transcript.h"
#include "switchasr/wav_io.h"

namespace switchasr {

namespace {

namespace fs = std::filesystem;

// (F1, F2, F3) of a handful of vowels, Hz.
constexpr std::array<std::array<double, 3>, 5> kVowels = {{
    {800, 1200, 2500},  // a
    {300, 2300, 3000},  // i
    {350, 1300, 2400},  // u
    {500, 1900, 2600},  // e
    {500, 900, 2500},   // o
}};

class Resonator {
 public:
  void Set(double freq, double bw) {
    const double r = std::exp(-std::numbers::pi * bw / kSampleRate);
    a1_ = 2.0 * r * std::cos(2.0 * std::numbers::pi * freq / kSampleRate);
    a2_ = -r * r;
    gain_ = 1.0 - a1_ - a2_;
  }
  double Step(double x) {
    const double y = gain_ * x + a1_ * y1_ + a2_ * y2_;
    y2_ = y1_;
    y1_ = y;
    return y;
  }

 private:
  double a1_ = 0, a2_ = 0, gain_ = 1, y1_ = 0, y2_ = 0;
};

void NormalizeRms(std::vector<double> &x, double rms) {
  double e = 0.0;
  for (double v : x) e += v * v;
  if (e <= 0.0) return;
  const double g = rms / std::sqrt(e / static_cast<double>(x.size()));
  for (double &v : x) v *= g;
}

std::string ReadText(const fs::path &p) {
  std::ifstream is(p);
  if (!is) throw InvalidInput("cannot open transcript '" + p.string() + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

SpeakerProfile RandomSpeaker(std::string id, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SpeakerProfile p;
  p.id = std::move(id);
  const bool high = u(rng) < 0.5;
  p.f0_hz = high ? 170.0 + 80.0 * u(rng) : 90.0 + 50.0 * u(rng);
  p.formant_scale = (high ? 1.08 : 0.95) + 0.08 * (u(rng) - 0.5);
  p.tilt = 0.85 + 0.1 * u(rng);
  return p;
}

Waveform SynthesizeSpeech(const SpeakerProfile &spk, std::size_t length,
                          std::mt19937_64 &rng, double rms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> env(length, 0.0);
  std::vector<std::array<double, 3>> formants(length, kVowels[0]);

  // Syllable layout: lead-in silence, then bursts separated by optional gaps.
  std::size_t pos = static_cast<std::size_t>((0.01 + 0.03 * u(rng)) * kSampleRate);
  const std::size_t tail = static_cast<std::size_t>((0.01 + 0.02 * u(rng)) * kSampleRate);
  while (pos + tail < length) {
    const auto dur = static_cast<std::size_t>((0.06 + 0.08 * u(rng)) * kSampleRate);
    const std::size_t end = std::min(length - tail, pos + dur);
    const auto &v = kVowels[static_cast<std::size_t>(u(rng) * kVowels.size()) % kVowels.size()];
    const double level = 0.5 + 0.5 * u(rng);
    for (std::size_t i = pos; i < end; ++i) {
      const double x = static_cast<double>(i - pos) / static_cast<double>(end - pos);
      env[i] = level * std::sin(std::numbers::pi * x);
      for (int k = 0; k < 3; ++k) formants[i][k] = v[k] * spk.formant_scale;
    }
    pos = end;
    if (u(rng) < 0.6) pos += static_cast<std::size_t>((0.02 + 0.05 * u(rng)) * kSampleRate);
  }

  std::array<Resonator, 3> res;
  const double bws[3] = {80.0, 110.0, 160.0};
  double phase = 0.0, glottal = 0.0;
  const double drift = 0.1 * (u(rng) - 0.5);
  std::vector<double> out(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(length);
    const double f0 = spk.f0_hz * (1.0 + drift * t + 0.01 * gauss(rng));
    phase += f0 / kSampleRate;
    double pulse = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      pulse = 1.0;
    }
    glottal = spk.tilt * glottal + pulse + 0.02 * gauss(rng);
    for (int k = 0; k < 3; ++k) res[k].Set(formants[i][k], bws[k]);
    double y = glottal;
    for (int k = 0; k < 3; ++k) y = res[k].Step(y) + 0.3 * y;
    out[i] = env[i] * y;
  }
  NormalizeRms(out, rms);
  return Waveform(std::move(out));
}

Waveform SynthesizeNoise(std::size_t length, std::mt19937_64 &rng, double rms) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double pole = -0.3 + 1.2 * u(rng) * 0.95;
  std::vector<double> out(length);
  double prev = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    prev = pole * prev + gauss(rng);
    out[i] = prev;
  }
  NormalizeRms(out, rms);
  return Waveform(std::move(out));
}

std::string RandomTranscript(int length, std::mt19937_64 &rng) {
  // U+3042 .. U+3093 (hiragana a .. n).
  std::uniform_int_distribution<int> pick(0x3042, 0x3093);
  std::u32string s;
  for (int i = 0; i < length; ++i) s.push_back(static_cast<char32_t>(pick(rng)));
  return Utf32ToUtf8(s);
}

SpeechPool SpeechPool::Synthetic(int num_speakers, std::uint64_t seed,
                                 const SynthConfig &cfg) {
  if (num_speakers < 2) throw InvalidInput("speech pool needs at least two speakers");
  SpeechPool pool;
  pool.cfg_ = cfg;
  pool.synthetic_ = true;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < num_speakers; ++s) {
    char id[16];
    std::snprintf(id, sizeof(id), "spk%03d", s);
    Speaker spk;
    spk.id = id;
    spk.profile = RandomSpeaker(id, rng);
    spk.enrollment = SynthesizeSpeech(spk.profile, cfg.enrollment_samples, rng, cfg.rms);
    pool.speakers_.push_back(std::move(spk));
  }
  return pool;
}

SpeechPool SpeechPool::FromDirectory(const std::string &dir) {
  SpeechPool pool;
  std::vector<fs::path> speaker_dirs;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.is_directory()) speaker_dirs.push_back(e.path());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());
  for (const auto &sd : speaker_dirs) {
    std::vector<fs::path> wavs;
    for (const auto &e : fs::directory_iterator(sd))
      if (e.path().extension() == ".wav") wavs.push_back(e.path());
    std::sort(wavs.begin(), wavs.end());
    if (wavs.size() < 2)
      throw InvalidInput("speaker directory '" + sd.string() +
                         "' needs an enrollment and at least one utterance");
    Speaker spk;
    spk.id = sd.filename().string();
    spk.enrollment = ReadWav(wavs.front().string());
    for (std::size_t i = 1; i < wavs.size(); ++i) {
      fs::path txt = wavs[i];
      txt.replace_extension(".txt");
      spk.utterances.push_back({ReadWav(wavs[i].string()), ReadText(txt)});
    }
    pool.speakers_.push_back(std::move(spk));
  }
  if (pool.speakers_.size() < 2)
    throw InvalidInput("speech pool '" + dir + "' needs at least two speakers");
  return pool;
}

SpeechSample SpeechPool::Draw(int speaker, std::mt19937_64 &rng) const {
  const Speaker &spk = speakers_.at(speaker);
  if (!synthetic_) {
    std::uniform_int_distribution<std::size_t> pick(0, spk.utterances.size() - 1);
    return spk.utterances[pick(rng)];
  }
  std::uniform_int_distribution<std::size_t> len(cfg_.min_samples, cfg_.max_samples);
  std::uniform_int_distribution<int> chars(cfg_.min_transcript_chars, cfg_.max_transcript_chars);
  const std::size_t n = len(rng);
  SpeechSample s{SynthesizeSpeech(spk.profile, n, rng, cfg_.rms), {}};
  s.transcript = RandomTranscript(chars(rng), rng);
  return s;
}

NoisePool NoisePool::Synthetic(const SynthConfig &cfg) {
  NoisePool pool;
  pool.cfg_ = cfg;
  pool.synthetic_ = true;
  return pool;
}

NoisePool NoisePool::FromDirectory(const std::string &dir) {
  NoisePool pool;
  std::vector<fs::path> wavs;
  for (const auto &e : fs::directory_iterator(dir))
    if (e.path().extension() == ".wav") wavs.push_back(e.path());
  std::sort(wavs.begin(), wavs.end());
  for (const auto &p : wavs) pool.files_.push_back(ReadWav(p.string()));
  if (pool.files_.empty()) throw InvalidInput("noise pool '" + dir + "' has no wav files");
  return pool;
}

Waveform NoisePool::Draw(std::size_t length, std::mt19937_64 &rng) const {
  if (synthetic_) return SynthesizeNoise(length, rng, cfg_.rms);
  std::uniform_int_distribution<std::size_t> pick(0, files_.size() - 1);
  const Waveform &src = files_[pick(rng)];
  std::uniform_int_distribution<std::size_t> off(0, src.size() - 1);
  const std::size_t start = off(rng);
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = src[(start + i) % src.size()];
  return Waveform(std::move(out), src.sample_rate());
}

}  // namespace switchasr
