// core/src/model.cc

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

#include "switchasr/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "switchasr/error.h"

namespace switchasr {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Strided = Eigen::Map<MatrixXd, 0, Eigen::OuterStride<>>;
using ConstStrided = Eigen::Map<const MatrixXd, 0, Eigen::OuterStride<>>;

constexpr double kProbFloor = 1e-12;

// Rows [row0, row0 + rows) of the B columns at time t in an item-major
// (b * T + t) activation matrix with `ld` rows.
Strided StepView(MatrixXd &m, int t, int row0, int rows, int batch, int frames) {
  return Strided(m.data() + static_cast<std::ptrdiff_t>(t) * m.rows() + row0, rows,
                 batch, Eigen::OuterStride<>(m.rows() * frames));
}
ConstStrided StepView(const MatrixXd &m, int t, int row0, int rows, int batch,
                      int frames) {
  return ConstStrided(m.data() + static_cast<std::ptrdiff_t>(t) * m.rows() + row0,
                      rows, batch, Eigen::OuterStride<>(m.rows() * frames));
}

template <class Derived>
void SigmoidInPlace(Eigen::MatrixBase<Derived> &&x) {
  x.derived().array() = (1.0 + (-x.derived().array()).exp()).inverse();
}

void SoftmaxColumn(const Eigen::Ref<const VectorXd> &z, Eigen::Ref<VectorXd> out) {
  const double m = z.maxCoeff();
  out = (z.array() - m).exp();
  out /= out.sum();
}

void RunLstmDirection(const ModelParams &params, int layer, int dir,
                      ForwardCache &c) {
  const Architecture &a = params.arch();
  const ParamLayout &lay = params.layout();
  const int H = a.hidden, B = c.batch, T = c.max_frames;
  const auto wx = params.Tensor(lay.Lstm(layer, dir, ParamLayout::kWx));
  const auto wh = params.Tensor(lay.Lstm(layer, dir, ParamLayout::kWh));
  const auto bias = params.Tensor(lay.Lstm(layer, dir, ParamLayout::kBias));

  MatrixXd &gates = c.gates[layer][dir];
  MatrixXd &cells = c.cells[layer][dir];
  MatrixXd &tcells = c.tanh_cells[layer][dir];
  MatrixXd &out = c.layer_inputs[layer + 1];
  gates.noalias() = wx * c.layer_inputs[layer];
  gates.colwise() += bias.col(0);
  cells.setZero(H, static_cast<Eigen::Index>(T) * B);
  tcells.setZero(H, static_cast<Eigen::Index>(T) * B);

  MatrixXd h_prev = MatrixXd::Zero(H, B), c_prev = MatrixXd::Zero(H, B);
  MatrixXd c_t(H, B), tc_t(H, B), h_t(H, B);
  for (int s = 0; s < T; ++s) {
    const int t = dir == 0 ? s : T - 1 - s;
    Strided g = StepView(gates, t, 0, 4 * H, B, T);
    g.noalias() += wh * h_prev;
    SigmoidInPlace(g.topRows(2 * H));
    g.middleRows(2 * H, H) = g.middleRows(2 * H, H).array().tanh();
    SigmoidInPlace(g.bottomRows(H));

    c_t = g.middleRows(H, H).cwiseProduct(c_prev) +
          g.topRows(H).cwiseProduct(g.middleRows(2 * H, H));
    tc_t = c_t.array().tanh();
    h_t = g.bottomRows(H).cwiseProduct(tc_t);
    for (int b = 0; b < B; ++b) {
      if (t >= c.lengths[b]) {
        c_t.col(b).setZero();
        tc_t.col(b).setZero();
        h_t.col(b).setZero();
      }
    }
    StepView(cells, t, 0, H, B, T) = c_t;
    StepView(tcells, t, 0, H, B, T) = tc_t;
    StepView(out, t, dir * H, H, B, T) = h_t;
    h_prev.swap(h_t);
    c_prev.swap(c_t);
  }
}

// Accumulates parameter gradients of one LSTM direction and adds the input
// gradient into d_input. d_out holds the gradient w.r.t. this layer's output.
void BackpropLstmDirection(const ModelParams &params, int layer, int dir,
                           const ForwardCache &c, const MatrixXd &d_out,
                           MatrixXd &d_input, ModelParams &grad) {
  const Architecture &a = params.arch();
  const ParamLayout &lay = params.layout();
  const int H = a.hidden, B = c.batch, T = c.max_frames;
  const auto wx = params.Tensor(lay.Lstm(layer, dir, ParamLayout::kWx));
  const auto wh = params.Tensor(lay.Lstm(layer, dir, ParamLayout::kWh));

  const MatrixXd &gates = c.gates[layer][dir];
  const MatrixXd &cells = c.cells[layer][dir];
  const MatrixXd &tcells = c.tanh_cells[layer][dir];
  const MatrixXd &out = c.layer_inputs[layer + 1];

  MatrixXd d_gates = MatrixXd::Zero(4 * H, static_cast<Eigen::Index>(T) * B);
  MatrixXd dh_next = MatrixXd::Zero(H, B), dc_next = MatrixXd::Zero(H, B);
  MatrixXd dh(H, B), dc(H, B), c_prev(H, B);
  const MatrixXd zero_state = MatrixXd::Zero(H, B);

  for (int s = T - 1; s >= 0; --s) {
    const int t = dir == 0 ? s : T - 1 - s;
    const int t_prev = dir == 0 ? t - 1 : t + 1;
    const ConstStrided g = StepView(gates, t, 0, 4 * H, B, T);
    const ConstStrided tc = StepView(tcells, t, 0, H, B, T);
    if (t_prev >= 0 && t_prev < T)
      c_prev = StepView(cells, t_prev, 0, H, B, T);
    else
      c_prev = zero_state;

    dh = StepView(d_out, t, dir * H, H, B, T) + dh_next;
    const auto i_g = g.topRows(H).array();
    const auto f_g = g.middleRows(H, H).array();
    const auto g_g = g.middleRows(2 * H, H).array();
    const auto o_g = g.bottomRows(H).array();
    dc = (dc_next.array() + dh.array() * o_g * (1.0 - tc.array().square())).matrix();

    Strided dg = StepView(d_gates, t, 0, 4 * H, B, T);
    dg.topRows(H) = (dc.array() * g_g * i_g * (1.0 - i_g)).matrix();
    dg.middleRows(H, H) = (dc.array() * c_prev.array() * f_g * (1.0 - f_g)).matrix();
    dg.middleRows(2 * H, H) = (dc.array() * i_g * (1.0 - g_g.square())).matrix();
    dg.bottomRows(H) = (dh.array() * tc.array() * o_g * (1.0 - o_g)).matrix();
    dc_next = (dc.array() * f_g).matrix();
    for (int b = 0; b < B; ++b) {
      if (t >= c.lengths[b]) {
        dg.col(b).setZero();
        dc_next.col(b).setZero();
      }
    }
    dh_next.noalias() = wh.transpose() * dg;
  }

  // h_{t_prev} for every column, zero where the recurrence starts.
  MatrixXd h_prev = MatrixXd::Zero(H, static_cast<Eigen::Index>(T) * B);
  for (int b = 0; b < B; ++b) {
    const Eigen::Index base = static_cast<Eigen::Index>(b) * T;
    if (T > 1) {
      if (dir == 0)
        h_prev.block(0, base + 1, H, T - 1) = out.block(dir * H, base, H, T - 1);
      else
        h_prev.block(0, base, H, T - 1) = out.block(dir * H, base + 1, H, T - 1);
    }
  }

  grad.Tensor(lay.Lstm(layer, dir, ParamLayout::kWx)).noalias() +=
      d_gates * c.layer_inputs[layer].transpose();
  grad.Tensor(lay.Lstm(layer, dir, ParamLayout::kWh)).noalias() +=
      d_gates * h_prev.transpose();
  grad.Tensor(lay.Lstm(layer, dir, ParamLayout::kBias)).col(0) +=
      d_gates.rowwise().sum();
  d_input.noalias() += wx.transpose() * d_gates;
}

}  // namespace

void Architecture::Validate() const {
  if (input_dim <= 0 || hidden <= 0 || layers <= 0 || attn_dim <= 0 ||
      fc_hidden <= 0)
    throw InvalidInput("architecture constants must be positive");
  if (classes != 2) throw InvalidInput("switch network is binary (classes = 2)");
}

ParamLayout::ParamLayout(const Architecture &arch) {
  arch.Validate();
  const int H = arch.hidden;
  auto add = [this](std::string name, int rows, int cols) {
    tensors_.push_back({std::move(name), rows, cols, total_});
    total_ += static_cast<std::size_t>(rows) * cols;
  };
  for (int l = 0; l < arch.layers; ++l) {
    const int in = l == 0 ? arch.input_dim : 2 * H;
    for (int d = 0; d < 2; ++d) {
      const std::string p = "lstm" + std::to_string(l) + (d == 0 ? ".fwd" : ".bwd");
      add(p + ".wx", 4 * H, in);
      add(p + ".wh", 4 * H, H);
      add(p + ".b", 4 * H, 1);
    }
  }
  first_head_ = static_cast<int>(tensors_.size());
  add("attn.w", arch.attn_dim, 2 * H);
  add("attn.b", arch.attn_dim, 1);
  add("attn.context", arch.attn_dim, 1);
  add("fc1.w", arch.fc_hidden, 2 * H);
  add("fc1.b", arch.fc_hidden, 1);
  add("fc2.w", arch.classes, arch.fc_hidden);
  add("fc2.b", arch.classes, 1);
}

ModelParams::ModelParams(const Architecture &arch)
    : arch_(arch), layout_(arch), values_(layout_.total(), 0.0) {}

ModelParams::MatMap ModelParams::Tensor(int index) {
  const TensorInfo &t = layout_.tensors().at(index);
  return MatMap(values_.data() + t.offset, t.rows, t.cols);
}

ModelParams::ConstMatMap ModelParams::Tensor(int index) const {
  const TensorInfo &t = layout_.tensors().at(index);
  return ConstMatMap(values_.data() + t.offset, t.rows, t.cols);
}

void ModelParams::SetZero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool ModelParams::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

ModelParams InitParams(const Architecture &arch, std::uint64_t seed) {
  ModelParams p(arch);
  std::mt19937_64 rng(seed);
  auto fill = [&](int index, double k) {
    std::uniform_real_distribution<double> u(-k, k);
    auto m = p.Tensor(index);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
  };
  const ParamLayout &lay = p.layout();
  const double k = 1.0 / std::sqrt(static_cast<double>(arch.hidden));
  for (int l = 0; l < arch.layers; ++l) {
    for (int d = 0; d < 2; ++d) {
      fill(lay.Lstm(l, d, ParamLayout::kWx), k);
      fill(lay.Lstm(l, d, ParamLayout::kWh), k);
      fill(lay.Lstm(l, d, ParamLayout::kBias), k);
      p.Tensor(lay.Lstm(l, d, ParamLayout::kBias))
          .middleRows(arch.hidden, arch.hidden)
          .array() += 1.0;
    }
  }
  const double k_pool = 1.0 / std::sqrt(2.0 * arch.hidden);
  fill(lay.attn_w(), k_pool);
  fill(lay.attn_b(), k_pool);
  fill(lay.attn_context(), 1.0 / std::sqrt(static_cast<double>(arch.attn_dim)));
  fill(lay.fc1_w(), k_pool);
  fill(lay.fc1_b(), k_pool);
  const double k_out = 1.0 / std::sqrt(static_cast<double>(arch.fc_hidden));
  fill(lay.fc2_w(), k_out);
  fill(lay.fc2_b(), k_out);
  return p;
}

BatchOutput Forward(const ModelParams &params,
                    std::span<const FeatureMatrix *const> batch,
                    ForwardCache *cache) {
  const Architecture &a = params.arch();
  const ParamLayout &lay = params.layout();
  if (batch.empty()) throw InvalidInput("forward: empty batch");

  ForwardCache local;
  ForwardCache &c = cache ? *cache : local;
  c.batch = static_cast<int>(batch.size());
  c.lengths.assign(batch.size(), 0);
  c.max_frames = 0;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const FeatureMatrix &f = *batch[b];
    if (f.frames() < 1) throw InvalidInput("forward: utterance has no frames");
    if (f.dims() != a.input_dim)
      throw InvalidInput("forward: expected " + std::to_string(a.input_dim) +
                         "-dim features, got " + std::to_string(f.dims()));
    c.lengths[b] = f.frames();
    c.max_frames = std::max(c.max_frames, f.frames());
  }
  const int B = c.batch, T = c.max_frames, H = a.hidden;
  const Eigen::Index TB = static_cast<Eigen::Index>(T) * B;

  c.layer_inputs.resize(a.layers + 1);
  c.gates.resize(a.layers);
  c.cells.resize(a.layers);
  c.tanh_cells.resize(a.layers);
  c.layer_inputs[0].setZero(a.input_dim, TB);
  for (int b = 0; b < B; ++b)
    c.layer_inputs[0].block(0, static_cast<Eigen::Index>(b) * T, a.input_dim,
                            c.lengths[b]) = batch[b]->values().transpose();

  for (int l = 0; l < a.layers; ++l) {
    c.layer_inputs[l + 1].setZero(2 * H, TB);
    RunLstmDirection(params, l, 0, c);
    RunLstmDirection(params, l, 1, c);
  }
  const MatrixXd &top = c.layer_inputs[a.layers];

  // Attention pooling.
  const auto aw = params.Tensor(lay.attn_w());
  const auto ab = params.Tensor(lay.attn_b());
  const auto actx = params.Tensor(lay.attn_context());
  c.attn_hidden.noalias() = aw * top;
  c.attn_hidden.colwise() += ab.col(0);
  c.attn_hidden = c.attn_hidden.array().tanh();
  const VectorXd scores = c.attn_hidden.transpose() * actx.col(0);
  c.attn_weights.setZero(TB);
  c.pooled.resize(2 * H, B);
  BatchOutput result;
  result.attention.resize(B);
  for (int b = 0; b < B; ++b) {
    const Eigen::Index base = static_cast<Eigen::Index>(b) * T;
    const int L = c.lengths[b];
    SoftmaxColumn(scores.segment(base, L), c.attn_weights.segment(base, L));
    c.pooled.col(b).noalias() =
        top.block(0, base, 2 * H, L) * c.attn_weights.segment(base, L);
    result.attention[b] = c.attn_weights.segment(base, L);
  }

  // Classifier head.
  c.fc1_pre.noalias() = params.Tensor(lay.fc1_w()) * c.pooled;
  c.fc1_pre.colwise() += params.Tensor(lay.fc1_b()).col(0);
  c.fc1_out = c.fc1_pre.cwiseMax(0.0);
  MatrixXd logits = params.Tensor(lay.fc2_w()) * c.fc1_out;
  logits.colwise() += params.Tensor(lay.fc2_b()).col(0);
  c.probs.resize(a.classes, B);
  result.posteriors.resize(B);
  for (int b = 0; b < B; ++b) {
    SoftmaxColumn(logits.col(b), c.probs.col(b));
    result.posteriors[b] = {c.probs(0, b), c.probs(1, b)};
  }
  return result;
}

Posterior Forward(const ModelParams &params, const FeatureMatrix &feats) {
  const FeatureMatrix *one[] = {&feats};
  return Forward(params, one).posteriors.front();
}

Eigen::VectorXd AttentionPool(const Eigen::MatrixXd &frames, const Eigen::MatrixXd &w,
                              const Eigen::VectorXd &b, const Eigen::VectorXd &context,
                              Eigen::VectorXd *weights) {
  if (frames.rows() < 1) throw InvalidInput("attention pool: no frames");
  if (w.cols() != frames.cols() || w.rows() != b.size() || b.size() != context.size())
    throw InvalidInput("attention pool: shape mismatch");
  MatrixXd u = (w * frames.transpose()).colwise() + b;
  u = u.array().tanh();
  const VectorXd scores = u.transpose() * context;
  VectorXd alpha(scores.size());
  SoftmaxColumn(scores, alpha);
  if (weights) *weights = alpha;
  return frames.transpose() * alpha;
}

double BceLoss(const Posterior &p_hat, const SwitchLabel &p) {
  auto term = [](double target, double prob) {
    if (target == 0.0) return 0.0;
    return -target * std::log(std::clamp(prob, kProbFloor, 1.0));
  };
  return term(p.p0, p_hat.p0) + term(p.p1, p_hat.p1);
}

double Backward(const ModelParams &params, const ForwardCache &c,
                std::span<const SwitchLabel> labels, ModelParams *grad) {
  const Architecture &a = params.arch();
  const ParamLayout &lay = params.layout();
  if (static_cast<int>(labels.size()) != c.batch)
    throw InvalidInput("backward: label count does not match batch");
  if (grad->arch() != a || grad->size() != params.size()) *grad = ModelParams(a);
  grad->SetZero();
  const int B = c.batch, T = c.max_frames, H = a.hidden;
  const Eigen::Index TB = static_cast<Eigen::Index>(T) * B;

  // Softmax + clamped cross-entropy, averaged over the batch.
  double loss = 0.0;
  MatrixXd d_logits(a.classes, B);
  for (int b = 0; b < B; ++b) {
    const Posterior p{c.probs(0, b), c.probs(1, b)};
    loss += BceLoss(p, labels[b]);
    const double target[2] = {labels[b].p0, labels[b].p1};
    VectorXd dp(a.classes);
    for (int k = 0; k < a.classes; ++k)
      dp(k) = c.probs(k, b) > kProbFloor && c.probs(k, b) <= 1.0
                  ? -target[k] / c.probs(k, b)
                  : 0.0;
    const double dot = dp.dot(c.probs.col(b));
    d_logits.col(b) = c.probs.col(b).cwiseProduct((dp.array() - dot).matrix()) / B;
  }
  loss /= B;

  grad->Tensor(lay.fc2_w()).noalias() = d_logits * c.fc1_out.transpose();
  grad->Tensor(lay.fc2_b()).col(0) = d_logits.rowwise().sum();
  MatrixXd d_fc1 = params.Tensor(lay.fc2_w()).transpose() * d_logits;
  d_fc1 = (c.fc1_pre.array() > 0.0).select(d_fc1, 0.0);
  grad->Tensor(lay.fc1_w()).noalias() = d_fc1 * c.pooled.transpose();
  grad->Tensor(lay.fc1_b()).col(0) = d_fc1.rowwise().sum();
  const MatrixXd d_pooled = params.Tensor(lay.fc1_w()).transpose() * d_fc1;

  // Attention pooling.
  const MatrixXd &top = c.layer_inputs[a.layers];
  const auto actx = params.Tensor(lay.attn_context());
  MatrixXd d_top = MatrixXd::Zero(2 * H, TB);
  VectorXd d_scores = VectorXd::Zero(TB);
  for (int b = 0; b < B; ++b) {
    const Eigen::Index base = static_cast<Eigen::Index>(b) * T;
    const int L = c.lengths[b];
    const auto alpha = c.attn_weights.segment(base, L);
    const VectorXd d_alpha = top.block(0, base, 2 * H, L).transpose() * d_pooled.col(b);
    const double mean = alpha.dot(d_alpha);
    d_scores.segment(base, L) = alpha.cwiseProduct((d_alpha.array() - mean).matrix());
    d_top.block(0, base, 2 * H, L).noalias() = d_pooled.col(b) * alpha.transpose();
  }
  grad->Tensor(lay.attn_context()).col(0) = c.attn_hidden * d_scores;
  const MatrixXd d_attn_pre =
      ((actx.col(0) * d_scores.transpose()).array() *
       (1.0 - c.attn_hidden.array().square()))
          .matrix();
  grad->Tensor(lay.attn_w()).noalias() = d_attn_pre * top.transpose();
  grad->Tensor(lay.attn_b()).col(0) = d_attn_pre.rowwise().sum();
  d_top.noalias() += params.Tensor(lay.attn_w()).transpose() * d_attn_pre;

  // BLSTM stack, top to bottom.
  MatrixXd d_out = std::move(d_top);
  for (int l = a.layers - 1; l >= 0; --l) {
    MatrixXd d_in = MatrixXd::Zero(c.layer_inputs[l].rows(), TB);
    BackpropLstmDirection(params, l, 0, c, d_out, d_in, *grad);
    BackpropLstmDirection(params, l, 1, c, d_out, d_in, *grad);
    d_out = std::move(d_in);
  }
  return loss;
}

double Loss(const ModelParams &params, const FeatureMatrix &feats, const SwitchLabel &label) {
  return BceLoss(Forward(params, feats), label);
}

double Grad(const ModelParams &params, const FeatureMatrix &feats, const SwitchLabel &label,
            ModelParams *grad) {
  ForwardCache cache;
  const FeatureMatrix *one[] = {&feats};
  Forward(params, one, &cache);
  const SwitchLabel labels[] = {label};
  return Backward(params, cache, labels, grad);
}

Posterior SwitchModel::Predict(const FeatureMatrix &feats) const {
  return Forward(params, normalizer.Apply(feats));
}

std::vector<Posterior> SwitchModel::PredictBatch(std::span<const FeatureMatrix> feats,
                                                 int batch_size) const {
  std::vector<Posterior> out;
  out.reserve(feats.size());
  for (std::size_t start = 0; start < feats.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(feats.size(), start + batch_size);
    std::vector<FeatureMatrix> normed;
    normed.reserve(end - start);
    for (std::size_t i = start; i < end; ++i) normed.push_back(normalizer.Apply(feats[i]));
    std::vector<const FeatureMatrix *> ptrs;
    for (const auto &f : normed) ptrs.push_back(&f);
    const BatchOutput o = Forward(params, ptrs);
    out.insert(out.end(), o.posteriors.begin(), o.posteriors.end());
  }
  return out;
}

}  // namespace switchasr
