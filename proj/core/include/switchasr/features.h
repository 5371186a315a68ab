// core/include/switchasr/features.h

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

#ifndef SWITCHASR_FEATURES_H_
#define SWITCHASR_FEATURES_H_

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "switchasr/waveform.h"

namespace switchasr {

struct FrameConfig {
  int window = 256;
  int hop = 128;
  int num_mel = 256;
  double low_hz = 0.0;
  double high_hz = 8000.0;
  double log_floor = 1e-10;
};

/// Number of frames for `length` samples: floor((T - window) / hop) + 1,
/// or 0 when T < window.
int NumFrames(std::size_t length, const FrameConfig &cfg = {});

/// Frames x dims matrix of real features; one row per analysis frame.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(Eigen::MatrixXd values);
  FeatureMatrix(int frames, int dims) : values_(Eigen::MatrixXd::Zero(frames, dims)) {}

  int frames() const { return static_cast<int>(values_.rows()); }
  int dims() const { return static_cast<int>(values_.cols()); }
  const Eigen::MatrixXd &values() const { return values_; }
  Eigen::MatrixXd &values() { return values_; }

  friend bool operator==(const FeatureMatrix &a, const FeatureMatrix &b) {
    return a.values_.rows() == b.values_.rows() &&
           a.values_.cols() == b.values_.cols() && a.values_ == b.values_;
  }

 private:
  Eigen::MatrixXd values_;
};

/// Triangular mel filters with edges uniformly spaced on the mel scale
/// 2595 log10(1 + f/700).
///
/// Filters are integrated against the piecewise-linear interpolation of the
/// power spectrum rather than sampled at bin centres, so narrow low-frequency
/// filters that fall between two FFT bins still receive weight from both
/// neighbours. Each filter's weights sum to one.
class MelFilterbank {
 public:
  explicit MelFilterbank(const FrameConfig &cfg = {});

  /// (window/2 + 1) x num_mel weight matrix.
  const Eigen::MatrixXd &weights() const { return weights_; }
  /// Centre frequency of each filter in Hz.
  const std::vector<double> &centers_hz() const { return centers_hz_; }

  static double HzToMel(double hz);
  static double MelToHz(double mel);

 private:
  Eigen::MatrixXd weights_;
  std::vector<double> centers_hz_;
};

/// Hann-windowed power spectra, one row per frame: frames x (window/2 + 1).
Eigen::MatrixXd PowerSpectrogram(const Waveform &w, const FrameConfig &cfg = {});

/// Natural log of mel filterbank energies plus log_floor. Throws InvalidInput
/// if the waveform is shorter than one window.
FeatureMatrix LogMel(const Waveform &w, const FrameConfig &cfg = {});

/// Frame-wise [logmel(enhanced) | logmel(observed)]. Lengths must match.
FeatureMatrix PairFeatures(const Waveform &observed, const Waveform &enhanced,
                           const FrameConfig &cfg = {});

/// Per-dimension mean/variance normalization fitted on a corpus.
struct FeatureNormalizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;

  bool empty() const { return mean.size() == 0; }
  static FeatureNormalizer Fit(std::span<const FeatureMatrix> corpus);
  FeatureMatrix Apply(const FeatureMatrix &f) const;
};

// Flat dump: uint32 frames, uint32 dims (little-endian), then frames*dims
// little-endian float32 values, row-major.
void WriteFeatureDump(const FeatureMatrix &f, std::ostream &os);
FeatureMatrix ReadFeatureDump(std::istream &is);

}  // namespace switchasr

#endif  // SWITCHASR_FEATURES_H_
