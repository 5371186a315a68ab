// core/src/features.cc

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

#include "switchasr/features.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>

#include "switchasr/error.h"

namespace switchasr {

namespace {

// Integral of the product of two piecewise-linear functions over the union of
// their breakpoints. Simpson's rule is exact on each quadratic piece.
template <class F, class G>
double IntegrateProduct(F f, G g, std::vector<double> knots, double lo,
                        double hi) {
  knots.push_back(lo);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = std::max(knots[i], lo), b = std::min(knots[i + 1], hi);
    if (b <= a) continue;
    const double m = 0.5 * (a + b);
    total += (b - a) / 6.0 *
             (f(a) * g(a) + 4.0 * f(m) * g(m) + f(b) * g(b));
  }
  return total;
}

struct DftTables {
  Eigen::VectorXd window;
  Eigen::MatrixXd cos_table;  // window x bins
  Eigen::MatrixXd sin_table;
};

const DftTables &GetDftTables(int n) {
  static std::mutex mu;
  static std::map<int, DftTables> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  DftTables t;
  const int bins = n / 2 + 1;
  t.window.resize(n);
  for (int i = 0; i < n; ++i)
    t.window(i) = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  t.cos_table.resize(n, bins);
  t.sin_table.resize(n, bins);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < bins; ++k) {
      // Reduce the phase index exactly before converting to an angle.
      const long long idx = (static_cast<long long>(i) * k) % n;
      const double ang = 2.0 * std::numbers::pi * static_cast<double>(idx) / n;
      t.cos_table(i, k) = std::cos(ang);
      t.sin_table(i, k) = -std::sin(ang);
    }
  }
  return cache.emplace(n, std::move(t)).first->second;
}

const MelFilterbank &GetFilterbank(const FrameConfig &cfg) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, double, double>, MelFilterbank> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(cfg.window, cfg.num_mel, cfg.low_hz, cfg.high_hz);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, MelFilterbank(cfg)).first->second;
}

}  // namespace

int NumFrames(std::size_t length, const FrameConfig &cfg) {
  if (length < static_cast<std::size_t>(cfg.window)) return 0;
  return static_cast<int>((length - cfg.window) / cfg.hop) + 1;
}

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {}

double MelFilterbank::HzToMel(double hz) {
  return 2595.0 * std::log10(1.0 + hz / 700.0);
}

double MelFilterbank::MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

MelFilterbank::MelFilterbank(const FrameConfig &cfg) {
  const int bins = cfg.window / 2 + 1;
  const double bin_hz = static_cast<double>(kSampleRate) / cfg.window;
  const double mel_lo = HzToMel(cfg.low_hz), mel_hi = HzToMel(cfg.high_hz);
  std::vector<double> edges(cfg.num_mel + 2);
  for (int i = 0; i < cfg.num_mel + 2; ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.num_mel + 1));

  weights_ = Eigen::MatrixXd::Zero(bins, cfg.num_mel);
  centers_hz_.resize(cfg.num_mel);
  for (int m = 0; m < cfg.num_mel; ++m) {
    const double l = edges[m], c = edges[m + 1], r = edges[m + 2];
    centers_hz_[m] = c;
    auto tri = [=](double f) {
      if (f <= l || f >= r) return 0.0;
      return f <= c ? (f - l) / (c - l) : (r - f) / (r - c);
    };
    const double area = 0.5 * (r - l);
    const int k_lo = std::max(0, static_cast<int>(std::floor(l / bin_hz)));
    const int k_hi = std::min(bins - 1, static_cast<int>(std::ceil(r / bin_hz)));
    for (int k = k_lo; k <= k_hi; ++k) {
      const double fk = k * bin_hz;
      auto hat = [=](double f) {
        const double d = std::abs(f - fk) / bin_hz;
        return d >= 1.0 ? 0.0 : 1.0 - d;
      };
      const double v = IntegrateProduct(tri, hat, {l, c, r, fk - bin_hz, fk, fk + bin_hz},
                                        std::max(l, fk - bin_hz),
                                        std::min(r, fk + bin_hz));
      weights_(k, m) = std::max(0.0, v / area);
    }
  }
}

Eigen::MatrixXd PowerSpectrogram(const Waveform &w, const FrameConfig &cfg) {
  const int frames = NumFrames(w.size(), cfg);
  if (frames == 0)
    throw InvalidInput("waveform of " + std::to_string(w.size()) +
                       " samples is shorter than one " +
                       std::to_string(cfg.window) + "-sample window");
  const DftTables &t = GetDftTables(cfg.window);
  Eigen::MatrixXd framed(frames, cfg.window);
  const auto s = w.samples();
  for (int f = 0; f < frames; ++f)
    for (int i = 0; i < cfg.window; ++i)
      framed(f, i) = s[static_cast<std::size_t>(f) * cfg.hop + i] * t.window(i);
  const Eigen::MatrixXd re = framed * t.cos_table;
  const Eigen::MatrixXd im = framed * t.sin_table;
  return re.array().square() + im.array().square();
}

FeatureMatrix LogMel(const Waveform &w, const FrameConfig &cfg) {
  const Eigen::MatrixXd power = PowerSpectrogram(w, cfg);
  const Eigen::MatrixXd mel = power * GetFilterbank(cfg).weights();
  return FeatureMatrix((mel.array() + cfg.log_floor).log().matrix());
}

FeatureMatrix PairFeatures(const Waveform &observed, const Waveform &enhanced,
                           const FrameConfig &cfg) {
  if (observed.size() != enhanced.size())
    throw InvalidInput("pair_features: observed has " +
                       std::to_string(observed.size()) +
                       " samples, enhanced has " +
                       std::to_string(enhanced.size()));
  const FeatureMatrix enh = LogMel(enhanced, cfg);
  const FeatureMatrix obs = LogMel(observed, cfg);
  Eigen::MatrixXd out(enh.frames(), enh.dims() + obs.dims());
  out << enh.values(), obs.values();
  return FeatureMatrix(std::move(out));
}

FeatureNormalizer FeatureNormalizer::Fit(std::span<const FeatureMatrix> corpus) {
  if (corpus.empty()) throw InvalidInput("normalizer: empty corpus");
  const int dims = corpus.front().dims();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dims);
  Eigen::VectorXd sq = Eigen::VectorXd::Zero(dims);
  double n = 0.0;
  for (const auto &f : corpus) {
    if (f.dims() != dims) throw InvalidInput("normalizer: inconsistent dims");
    sum += f.values().colwise().sum().transpose();
    sq += f.values().array().square().colwise().sum().matrix().transpose();
    n += f.frames();
  }
  if (n == 0.0) throw InvalidInput("normalizer: no frames");
  FeatureNormalizer norm;
  norm.mean = sum / n;
  const Eigen::ArrayXd var =
      (sq.array() / n - norm.mean.array().square()).max(0.0);
  norm.inv_std = (var + 1e-8).sqrt().inverse().matrix();
  return norm;
}

FeatureMatrix FeatureNormalizer::Apply(const FeatureMatrix &f) const {
  if (empty()) return f;
  if (f.dims() != mean.size())
    throw InvalidInput("normalizer: dims mismatch");
  Eigen::MatrixXd v = f.values();
  v.rowwise() -= mean.transpose();
  v.array().rowwise() *= inv_std.transpose().array();
  return FeatureMatrix(std::move(v));
}

void WriteFeatureDump(const FeatureMatrix &f, std::ostream &os) {
  static_assert(std::endian::native == std::endian::little,
                "feature dump writer assumes a little-endian host");
  const uint32_t hdr[2] = {static_cast<uint32_t>(f.frames()),
                           static_cast<uint32_t>(f.dims())};
  os.write(reinterpret_cast<const char *>(hdr), sizeof(hdr));
  std::vector<float> row(f.dims());
  for (int t = 0; t < f.frames(); ++t) {
    for (int d = 0; d < f.dims(); ++d) row[d] = static_cast<float>(f.values()(t, d));
    os.write(reinterpret_cast<const char *>(row.data()),
             static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
}

FeatureMatrix ReadFeatureDump(std::istream &is) {
  uint32_t hdr[2];
  is.read(reinterpret_cast<char *>(hdr), sizeof(hdr));
  if (is.gcount() != sizeof(hdr)) throw FormatError("feature dump: truncated header");
  Eigen::MatrixXd v(hdr[0], hdr[1]);
  std::vector<float> row(hdr[1]);
  for (uint32_t t = 0; t < hdr[0]; ++t) {
    is.read(reinterpret_cast<char *>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (static_cast<std::size_t>(is.gcount()) != row.size() * sizeof(float))
      throw FormatError("feature dump: truncated body");
    for (uint32_t d = 0; d < hdr[1]; ++d) v(t, d) = row[d];
  }
  return FeatureMatrix(std::move(v));
}

}  // namespace switchasr
