// core/include/switchasr/waveform.h

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

#ifndef SWITCHASR_WAVEFORM_H_
#define SWITCHASR_WAVEFORM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace switchasr {

inline constexpr int kSampleRate = 16000;

/// Mono sample sequence at kSampleRate. Samples are nominally in [-1, 1] but
/// may exceed that range before export.
class Waveform {
 public:
  Waveform() = default;
  explicit Waveform(std::vector<double> samples, int sample_rate = kSampleRate);
  Waveform(std::size_t length, double value, int sample_rate = kSampleRate)
      : Waveform(std::vector<double>(length, value), sample_rate) {}

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  int sample_rate() const { return sample_rate_; }

  double operator[](std::size_t i) const { return samples_[i]; }
  double &operator[](std::size_t i) { return samples_[i]; }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  Waveform Scaled(double gain) const;
  double PeakAbs() const;

  friend bool operator==(const Waveform &, const Waveform &) = default;

 private:
  std::vector<double> samples_;
  int sample_rate_ = kSampleRate;
};

/// Target, interference and noise mixed into an observed signal, with the
/// ground-truth levels measured on the scaled components.
struct MixtureBundle {
  Waveform observed;
  Waveform target;
  Waveform interference;
  Waveform noise;
  double true_sir_db = 0.0;
  double true_snr_db = 0.0;
  double interference_gain = 1.0;
  double noise_gain = 1.0;
};

/// Squared L2 norm. Throws InvalidInput on an empty waveform.
double Power(const Waveform &w);
double Power(std::span<const double> samples);

/// 10 log10(num / den). Throws UndefinedRatio unless both are positive.
double LevelDb(double num_power, double den_power);

/// Gain that brings `component` to `level_db` below `reference`:
/// sqrt(P_ref / (P_comp * 10^(level/10))).
double GainForLevel(double reference_power, double component_power,
                    double level_db);

/// Repeats or truncates `w` to exactly `length` samples.
Waveform LoopToLength(const Waveform &w, std::size_t length);

/// Scales interference and noise so that the bundle hits the requested SIR
/// and SNR; the target is never rescaled. All inputs must have equal length.
MixtureBundle MixAt(const Waveform &target, const Waveform &interference,
                    const Waveform &noise, double sir_db, double snr_db);

/// Sample-wise a*x + b*y. Lengths must match.
Waveform WeightedSum(double a, const Waveform &x, double b, const Waveform &y);

}  // namespace switchasr

#endif  // SWITCHASR_WAVEFORM_H_
