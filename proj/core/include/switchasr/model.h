// core/include/switchasr/model.h

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

#ifndef SWITCHASR_MODEL_H_
#define SWITCHASR_MODEL_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "switchasr/decision.h"
#include "switchasr/features.h"
#include "switchasr/transcript.h"

namespace switchasr {

/// Shape constants of the switch network: a stack of bidirectional LSTM
/// layers, attention pooling over time, one ReLU hidden layer and a softmax
/// output.
struct Architecture {
  int input_dim = 512;
  int hidden = 128;  // cells per direction
  int layers = 3;
  int attn_dim = 128;
  int fc_hidden = 128;
  int classes = 2;

  void Validate() const;
  friend bool operator==(const Architecture &, const Architecture &) = default;
};

struct TensorInfo {
  std::string name;
  int rows = 0;
  int cols = 0;
  std::size_t offset = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

/// Flat storage layout of every learnable array, in checkpoint order.
///
/// Per LSTM layer and direction (0 = forward in time, 1 = backward):
///   wx [4H x in], wh [4H x H], b [4H]   with gate rows ordered i, f, g, o
/// then attention w [A x 2H], b [A], context [A], fc1 w [F x 2H], b [F],
/// fc2 w [C x F], b [C]. Matrices are stored column-major.
class ParamLayout {
 public:
  enum LstmPart { kWx = 0, kWh = 1, kBias = 2 };

  ParamLayout() = default;
  explicit ParamLayout(const Architecture &arch);

  std::size_t total() const { return total_; }
  const std::vector<TensorInfo> &tensors() const { return tensors_; }

  int Lstm(int layer, int dir, LstmPart part) const {
    return (layer * 2 + dir) * 3 + part;
  }
  int attn_w() const { return first_head_; }
  int attn_b() const { return first_head_ + 1; }
  int attn_context() const { return first_head_ + 2; }
  int fc1_w() const { return first_head_ + 3; }
  int fc1_b() const { return first_head_ + 4; }
  int fc2_w() const { return first_head_ + 5; }
  int fc2_b() const { return first_head_ + 6; }

 private:
  std::vector<TensorInfo> tensors_;
  std::size_t total_ = 0;
  int first_head_ = 0;
};

/// All learnable arrays of the network in one flat buffer. The same type
/// holds gradients. The buffer is Eigen-aligned, which keeps vectorized
/// reductions bit-identical from run to run.
class ModelParams {
 public:
  using Buffer = std::vector<double, Eigen::aligned_allocator<double>>;
  using MatMap = Eigen::Map<Eigen::MatrixXd>;
  using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;

  ModelParams() = default;
  /// Zero-initialized parameters for `arch`.
  explicit ModelParams(const Architecture &arch);

  const Architecture &arch() const { return arch_; }
  const ParamLayout &layout() const { return layout_; }
  std::size_t size() const { return values_.size(); }
  Buffer &values() { return values_; }
  const Buffer &values() const { return values_; }

  MatMap Tensor(int index);
  ConstMatMap Tensor(int index) const;

  void SetZero();
  bool AllFinite() const;

 private:
  Architecture arch_;
  ParamLayout layout_;
  Buffer values_;
};

/// LSTM weights uniform(-1/sqrt(H), 1/sqrt(H)) with +1 on the forget-gate
/// bias; affine layers uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
ModelParams InitParams(const Architecture &arch, std::uint64_t seed);

/// Intermediate values kept from the forward pass for backpropagation.
/// Columns of every activation matrix are indexed item-major: b * T + t.
struct ForwardCache {
  int batch = 0;
  int max_frames = 0;
  std::vector<int> lengths;
  std::vector<Eigen::MatrixXd> layer_inputs;          // layers + 1 entries
  std::vector<std::array<Eigen::MatrixXd, 2>> gates;  // post-activation i,f,g,o
  std::vector<std::array<Eigen::MatrixXd, 2>> cells;
  std::vector<std::array<Eigen::MatrixXd, 2>> tanh_cells;
  Eigen::MatrixXd attn_hidden;  // tanh(W h + b), A x TB
  Eigen::VectorXd attn_weights;  // TB, zero on padding
  Eigen::MatrixXd pooled;        // 2H x B
  Eigen::MatrixXd fc1_pre;       // F x B
  Eigen::MatrixXd fc1_out;       // F x B
  Eigen::MatrixXd probs;         // C x B
};

struct BatchOutput {
  std::vector<Posterior> posteriors;
  std::vector<Eigen::VectorXd> attention;  // one weight per frame
};

/// Runs a padded batch of variable-length utterances. Padding is masked in the
/// recurrences and in pooling, so each posterior equals the unbatched one.
BatchOutput Forward(const ModelParams &params,
                    std::span<const FeatureMatrix *const> batch,
                    ForwardCache *cache = nullptr);

Posterior Forward(const ModelParams &params, const FeatureMatrix &feats);

/// Attention pooling of `frames` x dim rows: u_t = tanh(W h_t + b),
/// alpha = softmax_t(u_t . context), output sum_t alpha_t h_t.
Eigen::VectorXd AttentionPool(const Eigen::MatrixXd &frames, const Eigen::MatrixXd &w,
                              const Eigen::VectorXd &b, const Eigen::VectorXd &context,
                              Eigen::VectorXd *weights = nullptr);

/// -sum_k p_k ln(clamp(p_hat_k, 1e-12, 1)).
double BceLoss(const Posterior &p_hat, const SwitchLabel &p);

/// Mean BCE over the cached batch. Overwrites `grad` with the exact gradient
/// of the mean loss.
double Backward(const ModelParams &params, const ForwardCache &cache,
                std::span<const SwitchLabel> labels, ModelParams *grad);

/// Loss of one utterance.
double Loss(const ModelParams &params, const FeatureMatrix &feats, const SwitchLabel &label);

/// Loss and gradient of one utterance.
double Grad(const ModelParams &params, const FeatureMatrix &feats, const SwitchLabel &label,
            ModelParams *grad);

/// Trained network plus the feature normalization it was trained with.
struct SwitchModel {
  ModelParams params;
  FeatureNormalizer normalizer;  // empty when features are used raw

  Posterior Predict(const FeatureMatrix &feats) const;
  std::vector<Posterior> PredictBatch(std::span<const FeatureMatrix> feats,
                                      int batch_size = 32) const;
};

}  // namespace switchasr

#endif  // SWITCHASR_MODEL_H_
