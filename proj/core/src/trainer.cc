// core/src/trainer.cc

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

#include "switchasr/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "switchasr/error.h"

namespace switchasr {

void TrainConfig::Validate() const {
  arch.Validate();
  if (!(initial_lr > 0.0)) throw InvalidInput("learning rate must be positive");
  if (!(lr_factor > 0.0 && lr_factor < 1.0))
    throw InvalidInput("lr_factor must lie in (0, 1)");
  if (plateau_epochs < 1) throw InvalidInput("plateau_epochs must be >= 1");
  if (max_epochs < 1) throw InvalidInput("max_epochs must be >= 1");
  if (batch_size < 1) throw InvalidInput("batch_size must be >= 1");
}

void AdamStep(ModelParams *params, const ModelParams &grads, AdamState *state,
              double lr, double beta1, double beta2, double eps) {
  const std::size_t n = params->size();
  if (grads.size() != n) throw InvalidInput("adam: gradient shape mismatch");
  if (state->m.size() != n) {
    state->m.assign(n, 0.0);
    state->v.assign(n, 0.0);
    state->step = 0;
  }
  ++state->step;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(state->step));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(state->step));
  auto &p = params->values();
  const auto &g = grads.values();
  for (std::size_t i = 0; i < n; ++i) {
    state->m[i] = beta1 * state->m[i] + (1.0 - beta1) * g[i];
    state->v[i] = beta2 * state->v[i] + (1.0 - beta2) * g[i] * g[i];
    const double m_hat = state->m[i] / c1;
    const double v_hat = state->v[i] / c2;
    p[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}

PlateauSchedule::PlateauSchedule(double initial_lr, int patience, double factor)
    : lr_(initial_lr),
      patience_(patience),
      factor_(factor),
      best_(std::numeric_limits<double>::infinity()) {}

bool PlateauSchedule::Observe(double dev_loss) {
  if (dev_loss < best_) {
    best_ = dev_loss;
    bad_epochs_ = 0;
    return false;
  }
  if (++bad_epochs_ < patience_) return false;
  lr_ *= factor_;
  bad_epochs_ = 0;
  ++reductions_;
  return true;
}

SetMetrics EvaluateSet(const SwitchModel &model,
                       const std::vector<TrainingExample> &examples, int batch_size) {
  if (examples.empty()) throw InvalidInput("evaluate: empty set");
  std::vector<FeatureMatrix> feats;
  feats.reserve(examples.size());
  for (const auto &e : examples) feats.push_back(e.feats);
  const std::vector<Posterior> post = model.PredictBatch(feats, batch_size);
  SetMetrics m;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    m.loss += BceLoss(post[i], examples[i].label);
    const int predicted = post[i].p0 > post[i].p1 ? 0 : 1;
    if (predicted == examples[i].label.bit()) ++correct;
  }
  m.loss /= static_cast<double>(examples.size());
  m.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
  return m;
}

TrainResult Train(const std::vector<TrainingExample> &train_in,
                  const std::vector<TrainingExample> &dev_in, const TrainConfig &cfg,
                  const std::function<void(const EpochLog &)> &on_epoch) {
  cfg.Validate();
  auto drop_ties = [](const std::vector<TrainingExample> &in) {
    std::vector<TrainingExample> out;
    std::copy_if(in.begin(), in.end(), std::back_inserter(out),
                 [](const TrainingExample &e) { return !e.label.tie; });
    return out;
  };
  std::vector<TrainingExample> train = drop_ties(train_in);
  std::vector<TrainingExample> dev = drop_ties(dev_in);
  if (train.empty()) throw InvalidInput("train: no untied training examples");
  if (dev.empty()) throw InvalidInput("train: no untied dev examples");

  SwitchModel model{InitParams(cfg.arch, cfg.seed), {}};
  if (cfg.normalize_features) {
    std::vector<FeatureMatrix> feats;
    feats.reserve(train.size());
    for (const auto &e : train) feats.push_back(e.feats);
    model.normalizer = FeatureNormalizer::Fit(feats);
  }
  // Training features are normalized once up front; dev features go through
  // SwitchModel like inference inputs.
  std::vector<FeatureMatrix> train_feats;
  train_feats.reserve(train.size());
  for (const auto &e : train) train_feats.push_back(model.normalizer.Apply(e.feats));

  TrainResult result;
  result.model = model;
  double best_dev = std::numeric_limits<double>::infinity();
  PlateauSchedule schedule(cfg.initial_lr, cfg.plateau_epochs, cfg.lr_factor);
  AdamState adam;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ModelParams grad(cfg.arch);
  ForwardCache cache;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = schedule.lr();
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const FeatureMatrix *> batch;
      std::vector<SwitchLabel> labels;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&train_feats[order[i]]);
        labels.push_back(train[order[i]].label);
      }
      Forward(model.params, batch, &cache);
      const double loss = Backward(model.params, cache, labels, &grad);
      loss_sum += loss * static_cast<double>(end - start);
      AdamStep(&model.params, grad, &adam, lr, cfg.adam_beta1, cfg.adam_beta2,
               cfg.adam_eps);
    }
    if (!model.params.AllFinite())
      throw Error("train: parameters diverged at epoch " + std::to_string(epoch));

    const SetMetrics dev_metrics = EvaluateSet(model, dev, cfg.batch_size);
    EpochLog e{epoch, lr, loss_sum / static_cast<double>(train.size()), dev_metrics.loss,
               dev_metrics.accuracy};
    result.log.push_back(e);
    if (on_epoch) on_epoch(e);
    if (dev_metrics.loss < best_dev) {
      best_dev = dev_metrics.loss;
      result.model = model;
      result.best_epoch = epoch;
    }
    schedule.Observe(dev_metrics.loss);
  }
  return result;
}

std::string FormatEpochLog(const EpochLog &e) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%d\t%.6g\t%.9f\t%.9f\t%.6f", e.epoch, e.lr,
                e.train_loss, e.dev_loss, e.dev_acc);
  return buf;
}

void WriteTrainingLog(const std::vector<EpochLog> &log, std::ostream &os) {
  for (const auto &e : log) os << FormatEpochLog(e) << '\n';
}

}  // namespace switchasr
