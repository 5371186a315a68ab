// tests/unit/neural_switcher_test.cc

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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "grad_check.h"
#include "switchasr/checkpoint.h"
#include "switchasr/error.h"
#include "switchasr/model.h"
#include "switchasr/trainer.h"

namespace switchasr {
namespace {

using testing::CheckGradient;
using testing::RandomFeatures;

Architecture Small() {
  Architecture a;
  a.input_dim = 6;
  a.hidden = 3;
  a.attn_dim = 4;
  a.fc_hidden = 5;
  return a;
}

ModelParams Scaled(ModelParams p, double k) {
  for (double &v : p.values()) v *= k;
  return p;
}

TEST(ParamLayout, CountFollowsTheArchitecture) {
  const Architecture a;
  std::size_t expect = 0;
  for (int l = 0; l < 3; ++l) {
    const std::size_t in = l == 0 ? 512 : 256;
    expect += 2 * (4 * 128 * in + 4 * 128 * 128 + 4 * 128);
  }
  expect += 128 * 256 + 128 + 128;  // attention
  expect += 128 * 256 + 128;        // fc1
  expect += 2 * 128 + 2;            // fc2
  EXPECT_EQ(ParamLayout(a).total(), expect);
  EXPECT_EQ(ModelParams(a).size(), expect);
  EXPECT_EQ(ParamLayout(a).tensors().size(), 3u * 2 * 3 + 7);
  Architecture bad;
  bad.classes = 3;
  EXPECT_THROW(bad.Validate(), InvalidInput);
}

TEST(Forward, PosteriorIsADistribution) {
  std::mt19937_64 rng(1);
  const ModelParams p = InitParams(Architecture{}, 7);
  for (int frames : {1, 2, 5, 17}) {
    const Posterior q = Forward(p, RandomFeatures(frames, 512, rng, 3.0));
    EXPECT_GE(q.p0, 0.0);
    EXPECT_GE(q.p1, 0.0);
    EXPECT_NEAR(q.p0 + q.p1, 1.0, 1e-6);
  }
}

TEST(Forward, DeterministicAndShapeChecked) {
  std::mt19937_64 rng(2);
  const ModelParams p = InitParams(Architecture{}, 7);
  const FeatureMatrix f = RandomFeatures(6, 512, rng);
  const Posterior a = Forward(p, f), b = Forward(p, f);
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.p1, b.p1);
  EXPECT_THROW(Forward(p, RandomFeatures(3, 256, rng)), InvalidInput);
  EXPECT_THROW(Forward(p, FeatureMatrix(0, 512)), InvalidInput);
  EXPECT_EQ(InitParams(Architecture{}, 7).values(), p.values());
  EXPECT_NE(InitParams(Architecture{}, 8).values(), p.values());
}

TEST(Forward, AttentionWeights) {
  std::mt19937_64 rng(3);
  const ModelParams p = InitParams(Architecture{}, 9);
  std::vector<FeatureMatrix> feats{RandomFeatures(1, 512, rng), RandomFeatures(9, 512, rng)};
  std::vector<const FeatureMatrix *> ptrs{&feats[0], &feats[1]};
  const BatchOutput out = Forward(p, ptrs);
  ASSERT_EQ(out.attention[0].size(), 1);
  EXPECT_EQ(out.attention[0](0), 1.0);
  ASSERT_EQ(out.attention[1].size(), 9);
  EXPECT_GE(out.attention[1].minCoeff(), 0.0);
  EXPECT_NEAR(out.attention[1].sum(), 1.0, 1e-6);
}

TEST(Forward, PaddedBatchMatchesSingles) {
  std::mt19937_64 rng(4);
  const ModelParams p = InitParams(Architecture{}, 10);
  std::vector<FeatureMatrix> feats;
  for (int t : {3, 8, 1, 5}) feats.push_back(RandomFeatures(t, 512, rng, 2.0));
  std::vector<const FeatureMatrix *> ptrs;
  for (const auto &f : feats) ptrs.push_back(&f);
  const BatchOutput out = Forward(p, ptrs);
  for (std::size_t b = 0; b < feats.size(); ++b) {
    const Posterior q = Forward(p, feats[b]);
    EXPECT_NEAR(out.posteriors[b].p0, q.p0, 1e-6);
    EXPECT_NEAR(out.posteriors[b].p1, q.p1, 1e-6);
  }
}

TEST(Forward, ReversingFramesChangesThePosterior) {
  std::mt19937_64 rng(5);
  const ModelParams p = Scaled(InitParams(Architecture{}, 11), 2.0);
  const FeatureMatrix f = RandomFeatures(6, 512, rng, 2.0);
  const FeatureMatrix r(f.values().colwise().reverse());
  EXPECT_NE(Forward(p, f).p0, Forward(p, r).p0);
  const FeatureMatrix one = RandomFeatures(1, 512, rng);
  const FeatureMatrix one_r(one.values().colwise().reverse());
  EXPECT_EQ(Forward(p, one).p0, Forward(p, one_r).p0);
}

TEST(AttentionPool, ConvexCombination) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd w(4, 3);
  Eigen::VectorXd b(4), c(4);
  for (int i = 0; i < 4; ++i) {
    b(i) = g(rng);
    c(i) = 2.0 * g(rng);
    for (int j = 0; j < 3; ++j) w(i, j) = g(rng);
  }
  Eigen::MatrixXd same(5, 3);
  same.rowwise() = Eigen::RowVector3d(0.3, -1.2, 2.0);
  const Eigen::VectorXd o = AttentionPool(same, w, b, c);
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(o(j), same(0, j), 1e-12);

  const Eigen::MatrixXd one = Eigen::MatrixXd::Random(1, 3);
  Eigen::VectorXd weights;
  EXPECT_EQ(AttentionPool(one, w, b, c, &weights), one.row(0).transpose());
  EXPECT_EQ(weights(0), 1.0);

  for (int rep = 0; rep < 20; ++rep) {
    Eigen::MatrixXd h(7, 3);
    for (int t = 0; t < 7; ++t)
      for (int j = 0; j < 3; ++j) h(t, j) = g(rng);
    const Eigen::VectorXd v = AttentionPool(h, w, b, c, &weights);
    EXPECT_NEAR(weights.sum(), 1.0, 1e-12);
    EXPECT_GE(weights.minCoeff(), 0.0);
    for (int j = 0; j < 3; ++j) {
      EXPECT_GE(v(j), h.col(j).minCoeff() - 1e-12);
      EXPECT_LE(v(j), h.col(j).maxCoeff() + 1e-12);
    }
  }
}

TEST(BceLoss, HandValues) {
  EXPECT_LE(BceLoss({1.0, 0.0}, SwitchLabel::FromBit(0)), 1e-11);
  EXPECT_NEAR(BceLoss({0.5, 0.5}, SwitchLabel::FromBit(0)), std::log(2.0), 1e-12);
  EXPECT_NEAR(BceLoss({0.5, 0.5}, SwitchLabel::FromBit(1)), std::log(2.0), 1e-12);
  EXPECT_NEAR(BceLoss({0.9, 0.1}, SwitchLabel::FromBit(1)), -std::log(0.1), 1e-12);
  EXPECT_NEAR(BceLoss({1.0, 0.0}, SwitchLabel::FromBit(1)), -std::log(1e-12), 1e-9);
}

TEST(Grad, MatchesFiniteDifferencesEverywhere) {
  std::mt19937_64 rng(7);
  for (int frames : {1, 3, 4}) {
    const ModelParams p = Scaled(InitParams(Small(), 20 + frames), 3.0);
    const FeatureMatrix f = RandomFeatures(frames, 6, rng);
    for (int bit : {0, 1})
      for (const auto &c : CheckGradient(p, f, SwitchLabel::FromBit(bit), 0, rng))
        EXPECT_LT(c.worst, 1e-4) << c.name << " frames " << frames;
  }
}

TEST(Grad, OutputBiasIsPosteriorMinusTarget) {
  std::mt19937_64 rng(8);
  const ModelParams p = InitParams(Architecture{}, 12);
  const FeatureMatrix f = RandomFeatures(4, 512, rng);
  ModelParams g(p.arch());
  const SwitchLabel label = SwitchLabel::FromBit(0);
  Grad(p, f, label, &g);
  const Posterior q = Forward(p, f);
  const auto b = g.Tensor(g.layout().fc2_b());
  EXPECT_NEAR(b(0, 0), q.p0 - label.p0, 1e-12);
  EXPECT_NEAR(b(1, 0), q.p1 - label.p1, 1e-12);
}

TEST(Grad, SmallStepDescends) {
  std::mt19937_64 rng(9);
  const ModelParams p = InitParams(Architecture{}, 13);
  const FeatureMatrix f = RandomFeatures(5, 512, rng);
  const SwitchLabel label = SwitchLabel::FromBit(1);
  ModelParams g(p.arch());
  const double l0 = Grad(p, f, label, &g);
  ModelParams q = p;
  for (std::size_t i = 0; i < q.size(); ++i) q.values()[i] -= 1e-3 * g.values()[i];
  EXPECT_LT(Loss(q, f, label), l0);
}

TEST(Backward, BatchGradientIsTheMeanOfSingles) {
  std::mt19937_64 rng(10);
  const ModelParams p = Scaled(InitParams(Small(), 3), 2.0);
  std::vector<FeatureMatrix> feats{RandomFeatures(2, 6, rng), RandomFeatures(5, 6, rng),
                                   RandomFeatures(3, 6, rng)};
  std::vector<SwitchLabel> labels{SwitchLabel::FromBit(0), SwitchLabel::FromBit(1),
                                  SwitchLabel::FromBit(1)};
  std::vector<const FeatureMatrix *> ptrs{&feats[0], &feats[1], &feats[2]};
  ForwardCache cache;
  Forward(p, ptrs, &cache);
  ModelParams gb(p.arch());
  const double lb = Backward(p, cache, labels, &gb);
  std::vector<double> mean(p.size(), 0.0);
  double lsum = 0.0;
  for (int i = 0; i < 3; ++i) {
    ModelParams g(p.arch());
    lsum += Grad(p, feats[i], labels[i], &g);
    for (std::size_t k = 0; k < p.size(); ++k) mean[k] += g.values()[k] / 3.0;
  }
  EXPECT_NEAR(lb, lsum / 3.0, 1e-12);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(gb.values()[k], mean[k], 1e-12);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  ModelParams p = InitParams(Small(), 1);
  const ModelParams before = p;
  AdamState st;
  ModelParams zero(p.arch());
  for (int i = 0; i < 3; ++i) AdamStep(&p, zero, &st, 1e-3);
  EXPECT_EQ(p.values(), before.values());
}

TEST(Adam, FirstStepMovesBySignTimesRate) {
  ModelParams p = InitParams(Small(), 2);
  const ModelParams before = p;
  ModelParams g(p.arch());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double &v : g.values()) v = n(rng);
  AdamState st;
  AdamStep(&p, g, &st, 1e-4);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double step = p.values()[i] - before.values()[i];
    // lr * g / (|g| + eps) with bias-corrected moments.
    EXPECT_NEAR(step, -1e-4 * g.values()[i] / (std::abs(g.values()[i]) + 1e-8), 1e-15);
  }
  ModelParams p2 = before;
  AdamState st2;
  AdamStep(&p2, g, &st2, 1e-4);
  EXPECT_EQ(p2.values(), p.values());
}

TEST(PlateauSchedule, FlatLossHalvesAtEpochSix) {
  PlateauSchedule s(1e-4, 5, 0.5);
  std::vector<int> reduced_at;
  for (int epoch = 1; epoch <= 11; ++epoch)
    if (s.Observe(1.0)) reduced_at.push_back(epoch);
  EXPECT_EQ(reduced_at, (std::vector<int>{6, 11}));
  EXPECT_DOUBLE_EQ(s.lr(), 2.5e-5);
}

TEST(PlateauSchedule, ImprovementResetsTheCounter) {
  PlateauSchedule s(1.0, 5, 0.5);
  const std::vector<double> losses{1.0, 1.1, 1.2, 1.0, 1.3, 0.9, 0.95, 0.95, 0.95, 0.95, 0.95};
  std::vector<int> reduced_at;
  for (std::size_t e = 0; e < losses.size(); ++e)
    if (s.Observe(losses[e])) reduced_at.push_back(static_cast<int>(e) + 1);
  // Epoch 4 equals the best (no decrease); epoch 6 improves; epochs 7-11 are 5 bad.
  EXPECT_EQ(reduced_at, std::vector<int>{11});
  EXPECT_EQ(s.reductions(), 1);
}

std::vector<TrainingExample> Clusters(int n, std::uint64_t seed) {
  // Two Gaussian clusters per class; every frame of an utterance is its
  // cluster point.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::mt19937_64 centers_rng(99);
  std::normal_distribution<double> cg(0.0, 1.0);
  Eigen::MatrixXd centers(4, 512);
  for (int c = 0; c < 4; ++c)
    for (int d = 0; d < 512; ++d) centers(c, d) = cg(centers_rng);
  std::vector<TrainingExample> out;
  for (int i = 0; i < n; ++i) {
    const int c = i % 4;
    Eigen::RowVectorXd point = centers.row(c);
    for (int d = 0; d < 512; ++d) point(d) += noise(rng);
    const int frames = 2 + i % 3;
    Eigen::MatrixXd m(frames, 512);
    m.rowwise() = point;
    out.push_back({"u" + std::to_string(i), FeatureMatrix(m), SwitchLabel::FromBit(c / 2)});
  }
  return out;
}

TEST(Train, SeparableClustersAreLearned) {
  TrainConfig cfg;
  cfg.seed = 4;
  int epochs_seen = 0;
  const TrainResult r = Train(Clusters(64, 1), Clusters(64, 2), cfg,
                              [&](const EpochLog &) { ++epochs_seen; });
  EXPECT_EQ(epochs_seen, 50);
  ASSERT_EQ(r.log.size(), 50u);
  EXPECT_GT(r.log[r.best_epoch - 1].dev_acc, 0.95);
  EXPECT_GT(EvaluateSet(r.model, Clusters(64, 3)).accuracy, 0.95);
  for (const auto &e : r.log) EXPECT_GE(e.dev_loss, r.log[r.best_epoch - 1].dev_loss);
}

TEST(Train, SameSeedSameLog) {
  TrainConfig cfg;
  cfg.max_epochs = 3;
  cfg.seed = 5;
  const auto tr = Clusters(20, 4), dv = Clusters(8, 5);
  const TrainResult a = Train(tr, dv, cfg), b = Train(tr, dv, cfg);
  std::ostringstream la, lb;
  WriteTrainingLog(a.log, la);
  WriteTrainingLog(b.log, lb);
  EXPECT_EQ(la.str(), lb.str());
  EXPECT_EQ(a.model.params.values(), b.model.params.values());
}

TEST(Train, RejectsEmptySets) {
  TrainConfig cfg;
  cfg.max_epochs = 1;
  auto ties = Clusters(4, 6);
  for (auto &e : ties) e.label.tie = true;
  EXPECT_THROW(Train(ties, Clusters(4, 7), cfg), InvalidInput);
  EXPECT_THROW(Train(Clusters(4, 7), {}, cfg), InvalidInput);
  cfg.lr_factor = 1.0;
  EXPECT_THROW(cfg.Validate(), InvalidInput);
}

TEST(TrainingLog, Format) {
  EXPECT_EQ(FormatEpochLog({3, 5e-5, 0.25, 0.5, 0.75}), "3\t5e-05\t0.250000000\t0.500000000\t0.750000");
}

TEST(Checkpoint, RoundTripIsBitExact) {
  std::mt19937_64 rng(11);
  SwitchModel m;
  m.params = InitParams(Architecture{}, 14);
  std::vector<FeatureMatrix> corpus{RandomFeatures(4, 512, rng), RandomFeatures(3, 512, rng)};
  m.normalizer = FeatureNormalizer::Fit(corpus);
  std::stringstream ss;
  SaveCheckpoint(m, ss);
  const SwitchModel back = LoadCheckpoint(ss, Architecture{});
  EXPECT_EQ(back.params.values(), m.params.values());
  EXPECT_EQ(back.normalizer.mean, m.normalizer.mean);
  EXPECT_EQ(back.normalizer.inv_std, m.normalizer.inv_std);
  const Posterior a = m.Predict(corpus[0]), b = back.Predict(corpus[0]);
  EXPECT_EQ(a.p0, b.p0);
  EXPECT_EQ(a.p1, b.p1);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  SwitchModel m;
  m.params = InitParams(Small(), 1);
  std::stringstream ss;
  SaveCheckpoint(m, ss);
  const std::string bytes = ss.str();
  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{20}, bytes.size() / 2,
                          bytes.size() - 1}) {
    std::stringstream t(bytes.substr(0, cut));
    EXPECT_THROW(LoadCheckpoint(t), FormatError) << "cut at " << cut;
  }
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream b(bad);
  EXPECT_THROW(LoadCheckpoint(b), FormatError);
  std::stringstream ok(bytes);
  EXPECT_THROW(LoadCheckpoint(ok, Architecture{}), ArchitectureMismatch);
}

}  // namespace
}  // namespace switchasr
