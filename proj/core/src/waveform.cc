// core/src/waveform.cc

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

#include "switchasr/waveform.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "switchasr/error.h"

namespace switchasr {

Waveform::Waveform(std::vector<double> samples, int sample_rate)
    : samples_(std::move(samples)), sample_rate_(sample_rate) {
  if (sample_rate_ <= 0) throw InvalidInput("sample rate must be positive");
}

Waveform Waveform::Scaled(double gain) const {
  std::vector<double> out(samples_.size());
  std::transform(samples_.begin(), samples_.end(), out.begin(),
                 [gain](double s) { return gain * s; });
  return Waveform(std::move(out), sample_rate_);
}

double Waveform::PeakAbs() const {
  double peak = 0.0;
  for (double s : samples_) peak = std::max(peak, std::abs(s));
  return peak;
}

double Power(std::span<const double> samples) {
  if (samples.empty()) throw InvalidInput("power of an empty waveform");
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc;
}

double Power(const Waveform &w) { return Power(w.samples()); }

double LevelDb(double num_power, double den_power) {
  if (!(num_power > 0.0) || !(den_power > 0.0))
    throw UndefinedRatio("level ratio needs positive powers (got " +
                         std::to_string(num_power) + " / " +
                         std::to_string(den_power) + ")");
  return 10.0 * std::log10(num_power / den_power);
}

double GainForLevel(double reference_power, double component_power,
                    double level_db) {
  if (!(reference_power > 0.0) || !(component_power > 0.0))
    throw UndefinedRatio("cannot scale a zero-power component");
  return std::sqrt(reference_power /
                   (component_power * std::pow(10.0, level_db / 10.0)));
}

Waveform LoopToLength(const Waveform &w, std::size_t length) {
  if (w.empty()) throw InvalidInput("cannot loop an empty waveform");
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = w[i % w.size()];
  return Waveform(std::move(out), w.sample_rate());
}

MixtureBundle MixAt(const Waveform &target, const Waveform &interference,
                    const Waveform &noise, double sir_db, double snr_db) {
  if (target.empty())
    throw InvalidInput("mix_at: empty target");
  if (interference.size() != target.size() || noise.size() != target.size())
    throw InvalidInput("mix_at: components differ in length (target " +
                       std::to_string(target.size()) + ", interference " +
                       std::to_string(interference.size()) + ", noise " +
                       std::to_string(noise.size()) + ")");
  const double ps = Power(target);
  const double pi = Power(interference);
  const double pn = Power(noise);
  if (!(ps > 0.0)) throw UndefinedRatio("mix_at: zero-power target");

  MixtureBundle b;
  b.interference_gain = GainForLevel(ps, pi, sir_db);
  b.noise_gain = GainForLevel(ps, pn, snr_db);
  b.target = target;
  b.interference = interference.Scaled(b.interference_gain);
  b.noise = noise.Scaled(b.noise_gain);

  std::vector<double> y(target.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = b.target[i] + b.interference[i] + b.noise[i];
  b.observed = Waveform(std::move(y), target.sample_rate());
  b.true_sir_db = LevelDb(ps, Power(b.interference));
  b.true_snr_db = LevelDb(ps, Power(b.noise));
  return b;
}

Waveform WeightedSum(double a, const Waveform &x, double b, const Waveform &y) {
  if (x.size() != y.size())
    throw InvalidInput("weighted sum: length mismatch (" +
                       std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * x[i] + b * y[i];
  return Waveform(std::move(out), x.sample_rate());
}

}  // namespace switchasr
