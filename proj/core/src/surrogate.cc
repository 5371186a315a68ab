// core/src/surrogate.cc

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

#include "switchasr/surrogate.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "switchasr/error.h"

namespace switchasr {

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void CheckSameLength(const Waveform &a, const Waveform &b, const char *what) {
  if (a.size() != b.size()) throw InvalidInput(std::string("length mismatch: ") + what);
}

}  // namespace

Waveform ClipArtifact(const Waveform &target, double percentile) {
  if (target.empty()) throw InvalidInput("empty target");
  if (!(percentile >= 0.0 && percentile <= 100.0))
    throw InvalidInput("clip percentile outside [0, 100]");
  std::vector<double> mag(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) mag[i] = std::abs(target[i]);
  // Nearest-rank percentile.
  const auto rank = static_cast<std::size_t>(
      std::ceil(percentile / 100.0 * static_cast<double>(mag.size())));
  const std::size_t k = rank == 0 ? 0 : rank - 1;
  std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(k), mag.end());
  const double theta = mag[k];
  std::vector<double> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    out[i] = std::clamp(target[i], -theta, theta) - target[i];
  return Waveform(std::move(out), target.sample_rate());
}

Waveform SurrogateEnhance(const Waveform &target, const Waveform &interference,
                          const Waveform &noise, double alpha, const SurrogateConfig &cfg) {
  CheckSameLength(target, interference, "target/interference");
  CheckSameLength(target, noise, "target/noise");
  const Waveform art = ClipArtifact(target, cfg.clip_percentile);
  std::vector<double> out(target.size());
  for (std::size_t i = 0; i < target.size(); ++i)
    out[i] = target[i] + cfg.residual_gain * (interference[i] + noise[i]) + alpha * art[i];
  return Waveform(std::move(out), target.sample_rate());
}

double DrawArtifactStrength(double sir_db, double snr_db, std::mt19937_64 &rng,
                            const SurrogateConfig &cfg) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double db = cfg.artifact_center_db + cfg.artifact_slope * (sir_db - snr_db) +
                    cfg.artifact_jitter_db * gauss(rng);
  return std::pow(10.0, std::min(db, 0.0) / 20.0);
}

DistortionScores ScoreDistortion(const Waveform &input, const Waveform &target,
                                 const Waveform &interference, const Waveform &noise,
                                 const SurrogateConfig &cfg) {
  CheckSameLength(input, target, "input/target");
  CheckSameLength(target, interference, "target/interference");
  CheckSameLength(target, noise, "target/noise");
  const double ps = Power(target);
  if (ps <= 0.0) throw UndefinedRatio("silent target");
  const auto n = static_cast<Eigen::Index>(input.size());
  Eigen::Map<const Eigen::VectorXd> x(input.samples().data(), n);
  Eigen::Map<const Eigen::VectorXd> s(target.samples().data(), n);
  Eigen::MatrixXd basis(n, 3);
  basis.col(0) = s;
  basis.col(1) = Eigen::Map<const Eigen::VectorXd>(interference.samples().data(), n);
  basis.col(2) = Eigen::Map<const Eigen::VectorXd>(noise.samples().data(), n);

  const double floor_d = std::pow(10.0, cfg.distortion_floor_db / 10.0);
  const double floor_a = std::pow(10.0, cfg.artifact_floor_db / 10.0);
  DistortionScores out;
  const double pd = (x - s).squaredNorm();
  out.distortion_db = 10.0 * std::log10(std::max(pd / ps, floor_d));
  const Eigen::VectorXd coef = basis.completeOrthogonalDecomposition().solve(x);
  const double pa = (x - basis * coef).squaredNorm();
  out.artifact_db = 10.0 * std::log10(std::max(pa / ps, floor_a));
  out.error_rate = Sigmoid(
      (out.distortion_db + cfg.artifact_weight * out.artifact_db + cfg.offset_db) / cfg.slope_db);
  return out;
}

std::mt19937_64 UtteranceRng(std::uint64_t seed, const std::string &utt_id) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed),
                                   static_cast<std::uint32_t>(seed >> 32)};
  for (unsigned char c : utt_id) words.push_back(c);
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

Transcript CorruptTranscript(const Transcript &reference, double rate, std::uint64_t seed,
                             const std::string &utt_id) {
  constexpr char32_t kFirst = 0x3042, kLast = 0x3093;
  std::mt19937_64 rng = UtteranceRng(seed, utt_id);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(kLast - kFirst) - 1);
  std::u32string out = reference.chars();
  for (char32_t &c : out) {
    const double ui = u(rng);
    char32_t repl = kFirst + static_cast<char32_t>(pick(rng));
    if (repl >= c && c >= kFirst && c <= kLast) ++repl;  // never the same character
    if (ui < rate && c != U' ') c = repl;
  }
  return Transcript::FromUtf8(Utf32ToUtf8(out));
}

}  // namespace switchasr
