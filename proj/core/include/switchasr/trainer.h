// core/include/switchasr/trainer.h

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

#ifndef SWITCHASR_TRAINER_H_
#define SWITCHASR_TRAINER_H_

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "switchasr/features.h"
#include "switchasr/model.h"
#include "switchasr/transcript.h"

namespace switchasr {

struct TrainConfig {
  Architecture arch;
  double initial_lr = 1e-4;
  int plateau_epochs = 5;
  double lr_factor = 0.5;
  int max_epochs = 50;
  int batch_size = 32;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool normalize_features = false;

  void Validate() const;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long step = 0;
};

/// One bias-corrected Adam update of `params` in place.
void AdamStep(ModelParams *params, const ModelParams &grads, AdamState *state,
              double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

/// Multiplies the learning rate by `factor` once the dev loss has failed to
/// go below its best value for `patience` consecutive epochs. The counter
/// restarts on improvement and after every reduction.
class PlateauSchedule {
 public:
  PlateauSchedule(double initial_lr, int patience, double factor);

  /// Feeds one epoch's dev loss; returns true if the rate was reduced.
  bool Observe(double dev_loss);
  double lr() const { return lr_; }
  int reductions() const { return reductions_; }

 private:
  double lr_;
  int patience_;
  double factor_;
  double best_;
  int bad_epochs_ = 0;
  int reductions_ = 0;
};

struct TrainingExample {
  std::string utt_id;
  FeatureMatrix feats;
  SwitchLabel label;
};

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double dev_loss = 0.0;
  double dev_acc = 0.0;
};

struct TrainResult {
  SwitchModel model;  // parameters of the best dev-loss epoch
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

struct SetMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean BCE and accuracy (argmax with ties to enhanced) over a labeled set.
SetMetrics EvaluateSet(const SwitchModel &model,
                       const std::vector<TrainingExample> &examples, int batch_size = 32);

/// Mini-batch Adam on seeded shuffles; dev loss after every epoch drives the
/// plateau schedule and best-model selection. Tied examples are dropped;
/// throws InvalidInput if either set ends up empty.
TrainResult Train(const std::vector<TrainingExample> &train,
                  const std::vector<TrainingExample> &dev, const TrainConfig &cfg,
                  const std::function<void(const EpochLog &)> &on_epoch = {});

/// epoch <TAB> lr <TAB> train_loss <TAB> dev_loss <TAB> dev_acc, one per line.
void WriteTrainingLog(const std::vector<EpochLog> &log, std::ostream &os);
std::string FormatEpochLog(const EpochLog &e);

}  // namespace switchasr

#endif  // SWITCHASR_TRAINER_H_
