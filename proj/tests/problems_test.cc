// Copyright 2026 The ldpq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpq/problems.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ldpq/error.h"
#include "testing/generators.h"

namespace ldpq::problems {
namespace {

using ::testing::HasSubstr;

// Central differences of the loss, step h.
Eigen::VectorXd NumericGradient(LossKind kind, const Eigen::VectorXd& theta,
                                const DataPoint& x, double h = 1e-6) {
  Eigen::VectorXd g(theta.size());
  for (int k = 0; k < theta.size(); ++k) {
    Eigen::VectorXd plus = theta, minus = theta;
    plus(k) += h;
    minus(k) -= h;
    g(k) = (Loss(kind, plus, x) - Loss(kind, minus, x)) / (2 * h);
  }
  return g;
}

std::string ErrorText(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(LossGradientTest, LogisticAtOriginIsHalfFeature) {
  const Eigen::Vector3d a(0.5, -1.0, 2.0);
  for (double b : {-1.0, 1.0}) {
    const Eigen::VectorXd g =
        LossGradient(LossKind::kLogistic, Eigen::Vector3d::Zero(), DataPoint::Labeled(a, b));
    EXPECT_TRUE(g.isApprox(-(b / 2) * a, 1e-15));
  }
}

TEST(LossGradientTest, LogisticHandValue) {
  const Eigen::VectorXd g = LossGradient(LossKind::kLogistic, Eigen::Vector2d(1, 0),
                                         DataPoint::Labeled(Eigen::Vector2d(1, 0), 1.0));
  EXPECT_NEAR(g(0), -1.0 / (1.0 + std::exp(1.0)), 1e-15);
  EXPECT_NEAR(g(0), -0.2689, 1e-4);
  EXPECT_EQ(g(1), 0.0);
}

TEST(LossGradientTest, QuadraticZeroAtTarget) {
  const Eigen::Vector3d target(1.0, -2.0, 0.5);
  EXPECT_EQ(LossGradient(LossKind::kQuadratic, target, DataPoint::Target(target)),
            Eigen::VectorXd(Eigen::Vector3d::Zero()));
}

TEST(LossGradientTest, KindMismatchIsArgumentError) {
  try {
    LossGradient(LossKind::kQuadratic, Eigen::Vector2d::Zero(),
                 DataPoint::Labeled(Eigen::Vector2d(1, 1), 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kArgument);
  }
  EXPECT_THROW(LossGradient(LossKind::kLogistic, Eigen::Vector3d::Zero(),
                            DataPoint::Labeled(Eigen::Vector2d(1, 1), 1.0)),
               Error);
}

TEST(LossGradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 gen(2024);
  for (int c = 0; c < 100; ++c) {
    const int d = 1 + c % 6;
    const Eigen::VectorXd theta = testing::RandomVector(gen, d, 2.0);
    const DataPoint logistic = DataPoint::Labeled(testing::RandomVector(gen, d, 1.5),
                                                  c % 2 ? 1.0 : -1.0);
    const DataPoint quad = DataPoint::Target(testing::RandomVector(gen, d, 3.0));
    for (const auto& [kind, x] : {std::pair{LossKind::kLogistic, logistic},
                                  std::pair{LossKind::kQuadratic, quad}}) {
      const Eigen::VectorXd g = LossGradient(kind, theta, x);
      const Eigen::VectorXd fd = NumericGradient(kind, theta, x);
      ASSERT_LE((g - fd).norm(), 1e-5 * std::max(1.0, g.norm())) << "case " << c;
    }
  }
}

TEST(LossTest, LogisticStableForLargeMargins) {
  const DataPoint x = DataPoint::Labeled(Eigen::Vector2d(1, 0), 1.0);
  EXPECT_NEAR(Loss(LossKind::kLogistic, Eigen::Vector2d(-800, 0), x), 800.0, 1e-9);
  EXPECT_GE(Loss(LossKind::kLogistic, Eigen::Vector2d(800, 0), x), 0.0);
  EXPECT_TRUE(LossGradient(LossKind::kLogistic, Eigen::Vector2d(-800, 0), x).allFinite());
}

TEST(OnlineDatasetTest, QuadraticHandSum) {
  OnlineDataset ds(LossKind::kQuadratic);
  ds.Append({DataPoint::Target(Eigen::VectorXd::Constant(1, 0.0))});
  ds.Append({DataPoint::Target(Eigen::VectorXd::Constant(1, 2.0))});
  EXPECT_EQ(ds.OnlineGradient(Eigen::VectorXd::Constant(1, 1.0), 1)(0), 0.0);
  EXPECT_EQ(ds.OnlineGradient(Eigen::VectorXd::Constant(1, 0.0), 0)(0), 0.0);
}

TEST(OnlineDatasetTest, SingleRoundEqualsBatchGradient) {
  OnlineDataset ds(LossKind::kLogistic);
  const Batch batch{DataPoint::Labeled(Eigen::Vector2d(0.3, -0.1), 1.0),
                    DataPoint::Labeled(Eigen::Vector2d(-0.2, 0.4), -1.0)};
  ds.Append(batch);
  const Eigen::Vector2d theta(0.7, -1.1);
  EXPECT_TRUE(ds.OnlineGradient(theta, 0).isApprox(
      BatchGradient(LossKind::kLogistic, theta, batch), 1e-15));
}

TEST(OnlineDatasetTest, MissingRoundIsStateError) {
  OnlineDataset ds(LossKind::kQuadratic);
  ds.Append({DataPoint::Target(Eigen::Vector2d(1, 1))});
  try {
    ds.OnlineGradient(Eigen::Vector2d::Zero(), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kState);
  }
  EXPECT_THROW(ds.At(3), Error);
}

TEST(OnlineDatasetTest, IncrementalSumMatchesRecomputation) {
  std::mt19937_64 gen(77);
  OnlineDataset ds(LossKind::kLogistic);
  const Eigen::VectorXd theta = testing::RandomVector(gen, 4, 1.0);
  Eigen::VectorXd running = Eigen::VectorXd::Zero(4);
  for (int t = 0; t < 300; ++t) {
    Batch batch;
    for (int k = 0; k < 2; ++k)
      batch.push_back(DataPoint::Labeled(testing::RandomVector(gen, 4, 1.0), k ? 1.0 : -1.0));
    running += BatchGradient(LossKind::kLogistic, theta, batch);
    ds.Append(batch);
    const Eigen::VectorXd g = ds.OnlineGradient(theta, t);
    ASSERT_LE(((t + 1) * g - running).cwiseAbs().maxCoeff(), 1e-12) << t;
  }
}

TEST(OnlineDatasetTest, WindowAveragesRecentRounds) {
  OnlineDataset ds(LossKind::kQuadratic, 2);
  for (double v : {10.0, 2.0, 4.0})
    ds.Append({DataPoint::Target(Eigen::VectorXd::Constant(1, v))});
  // Window {2, 4} at theta = 0: mean of (0-2, 0-4).
  EXPECT_DOUBLE_EQ(ds.OnlineGradient(Eigen::VectorXd::Zero(1), 2)(0), -3.0);
}

TEST(CorpusTest, ParsesMixedSeparatorsAndMapsLabels) {
  std::istringstream in("0,1.5,2\n1\t-1 3\n\n0 0.25,0.5\n");
  const Corpus c = ParseCorpus(in, "mem");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.dimension(), 2);
  EXPECT_EQ(c.labels, (std::vector<double>{-1.0, 1.0, -1.0}));
  EXPECT_EQ(c.features[1], Eigen::VectorXd(Eigen::Vector2d(-1, 3)));
}

TEST(CorpusTest, RejectsRaggedRowsWithLineNumber) {
  std::istringstream in("1,0.5,0.5\n-1,0.1\n");
  const std::string msg = ErrorText([&] { ParseCorpus(in, "data.csv"); });
  EXPECT_THAT(msg, HasSubstr("data.csv:2"));
  EXPECT_THAT(msg, HasSubstr("ragged"));
}

TEST(CorpusTest, RejectsBadFieldsAndLabels) {
  std::istringstream bad_number("1,0.5,abc\n");
  EXPECT_THAT(ErrorText([&] { ParseCorpus(bad_number, "x"); }), HasSubstr("x:1"));
  std::istringstream three_labels("1,0\n2,0\n3,0\n");
  EXPECT_THAT(ErrorText([&] { ParseCorpus(three_labels, "x"); }), HasSubstr("labels"));
  std::istringstream empty("");
  EXPECT_THAT(ErrorText([&] { ParseCorpus(empty, "x"); }), HasSubstr("empty"));
  std::istringstream label_only("1\n");
  EXPECT_FALSE(ErrorText([&] { ParseCorpus(label_only, "x"); }).empty());
}

TEST(CorpusTest, WriteThenParseRoundTripsExactly) {
  GeneratorParams p;
  p.points = 200;
  p.dimension = 5;
  p.label_noise = 0.1;
  const Corpus c = MakeSeparableCorpus(p).corpus;
  std::stringstream buf;
  WriteCorpus(c, buf);
  const Corpus back = ParseCorpus(buf, "buf");
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t n = 0; n < c.size(); ++n) {
    ASSERT_EQ(back.features[n], c.features[n]);
    ASSERT_EQ(back.labels[n], c.labels[n]);
  }
  EXPECT_EQ(Fingerprint(back), Fingerprint(c));
}

TEST(GeneratorTest, NoiselessPointsClearTheMargin) {
  GeneratorParams p;
  p.points = 1000;
  p.dimension = 6;
  p.margin = 1.0;
  p.feature_l1 = 0.5;
  p.seed = 3;
  const SyntheticCorpus s = MakeSeparableCorpus(p);
  ASSERT_EQ(s.corpus.size(), 1000u);
  for (std::size_t n = 0; n < s.corpus.size(); ++n) {
    ASSERT_GE(s.corpus.labels[n] * s.planted.dot(s.corpus.features[n]), 1.0);
    ASSERT_LE(s.corpus.features[n].lpNorm<1>(), 0.5 + 1e-15);
  }
  EXPECT_EQ(Accuracy(s.planted, s.corpus), 1.0);
}

TEST(GeneratorTest, SameSeedSameCorpus) {
  GeneratorParams p;
  p.points = 50;
  const Corpus a = MakeSeparableCorpus(p).corpus;
  const Corpus b = MakeSeparableCorpus(p).corpus;
  EXPECT_EQ(Fingerprint(a), Fingerprint(b));
  p.seed = 2;
  EXPECT_NE(Fingerprint(a), Fingerprint(MakeSeparableCorpus(p).corpus));
}

TEST(GradBoundTest, Examples) {
  Corpus c;
  c.features = {Eigen::Vector2d(1, -2)};
  c.labels = {1.0};
  EXPECT_EQ(GradL1Bound(c), 3.0);
  c.features = {Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(0, 0, 0)};
  c.labels = {1.0, -1.0};
  EXPECT_EQ(GradL1Bound(c), 0.0);
  c.features = {Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(-2, 1), Eigen::Vector2d(1, 0)};
  c.labels = {1.0, -1.0, 1.0};
  EXPECT_EQ(GradL1Bound(c), 3.0);
}

TEST(GradBoundTest, HoldsForOnlineGradients) {
  GeneratorParams p;
  p.points = 300;
  p.dimension = 4;
  p.label_noise = 0.1;
  auto corpus = std::make_shared<const Corpus>(MakeSeparableCorpus(p).corpus);
  const double d_l = GradL1Bound(*corpus);
  CorpusSource source(corpus, 2, 5);
  OnlineDataset ds(LossKind::kLogistic);
  std::mt19937_64 gen(1);
  for (int t = 0; t < 200; ++t) {
    ds.Append(source.Draw(t, 0));
    const Eigen::VectorXd theta = testing::RandomVector(gen, 4, 50.0);
    ASSERT_LE(ds.OnlineGradient(theta, t).lpNorm<1>(), d_l + 1e-12);
  }
}

TEST(LogisticOptimumTest, MatchesGradientDescentOracle) {
  GeneratorParams p;
  p.points = 400;
  p.dimension = 3;
  p.feature_l1 = 3.0;
  p.label_noise = 0.15;
  p.seed = 12;
  const Corpus c = MakeSeparableCorpus(p).corpus;
  Eigen::VectorXd argmin;
  const double f_star = LogisticOptimum(c, &argmin);
  // Plain full-gradient descent with step 1/L as an independent oracle.
  const double step = 1.0 / LogisticLipschitz(c);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(3);
  LogisticObjective objective(std::make_shared<const Corpus>(c), f_star);
  for (int k = 0; k < 200000; ++k) {
    const Eigen::VectorXd g = objective.Gradient(theta);
    if (g.norm() < 1e-11) break;
    theta -= step * g;
  }
  EXPECT_NEAR(objective.Value(theta), f_star, 1e-9);
  EXPECT_LE((theta - argmin).norm(), 1e-5);
  EXPECT_LE(objective.Gradient(argmin).norm(), 1e-9);
}

TEST(LogisticOptimumTest, SeparableCorpusHasNoMinimizer) {
  Corpus c;
  c.features = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, -1.0)};
  c.labels = {1.0, -1.0};
  try {
    LogisticOptimum(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNumerical);
  }
}

TEST(LogisticOptimumTest, CacheIsKeyedByFingerprint) {
  GeneratorParams p;
  p.points = 100;
  p.dimension = 2;
  p.feature_l1 = 2.0;
  p.label_noise = 0.2;
  const Corpus c = MakeSeparableCorpus(p).corpus;
  const auto file = std::filesystem::temp_directory_path() / "ldpq_optimum_cache_test";
  std::filesystem::remove(file);
  const double fresh = CachedLogisticOptimum(c, file);
  ASSERT_TRUE(std::filesystem::exists(file));
  EXPECT_EQ(CachedLogisticOptimum(c, file), fresh);
  {
    // A cache for another corpus is ignored and rewritten.
    std::ofstream out(file);
    out << "fingerprint 0000000000000001\noptimum 123\n";
  }
  EXPECT_EQ(CachedLogisticOptimum(c, file), fresh);
  std::filesystem::remove(file);
}

TEST(QuadraticObjectiveTest, GapIsHalfSquaredDistance) {
  const std::vector<Eigen::VectorXd> means{Eigen::Vector2d(1, 0), Eigen::Vector2d(3, 2)};
  QuadraticObjective f(means, 0.7);
  const Eigen::Vector2d center(2, 1);
  EXPECT_EQ(f.minimizer(), Eigen::VectorXd(center));
  EXPECT_NEAR(f.Gap(center), 0.0, 1e-15);
  const double h = 0.3;
  EXPECT_NEAR(f.Gap(center + Eigen::Vector2d(h, 0)), h * h / 2, 1e-15);
  EXPECT_NEAR(f.Value(center + Eigen::Vector2d(h, 0)) - f.OptimalValue(), h * h / 2, 1e-12);
  EXPECT_LE(f.Gradient(center).norm(), 1e-15);
}

TEST(DataSourceTest, DrawIsDeterministicPerAgentAndRound) {
  GeneratorParams p;
  p.points = 100;
  auto corpus = std::make_shared<const Corpus>(MakeSeparableCorpus(p).corpus);
  CorpusSource a(corpus, 2, 9);
  CorpusSource b(corpus, 2, 9);
  EXPECT_EQ(a.Draw(5, 1), b.Draw(5, 1));
  EXPECT_EQ(a.Draw(5, 1).size(), 2u);
  EXPECT_FALSE(a.Draw(5, 1) == a.Draw(6, 1) && a.Draw(5, 1) == a.Draw(5, 2));
}

TEST(DataSourceTest, PerturbChangesExactlyOnePoint) {
  GeneratorParams p;
  p.points = 100;
  auto corpus = std::make_shared<const Corpus>(MakeSeparableCorpus(p).corpus);
  CorpusSource logistic(corpus, 3, 4);
  GaussianTargetSource quad({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)}, 1.0, 3, 4);
  for (const DataSource* src : {static_cast<const DataSource*>(&logistic),
                                static_cast<const DataSource*>(&quad)}) {
    for (int t = 0; t < 20; ++t) {
      const Batch original = src->Draw(t, 1);
      const Batch changed = src->Perturb(original, t, 1, 0);
      ASSERT_EQ(changed.size(), original.size());
      int differing = 0;
      for (std::size_t k = 0; k < original.size(); ++k)
        if (!(changed[k] == original[k])) ++differing;
      EXPECT_EQ(differing, 1);
      EXPECT_EQ(changed, src->Perturb(original, t, 1, 0));
    }
  }
}

TEST(MakeProblemTest, LogisticSplitsGeneratedCorpus) {
  ProblemSpec spec;
  spec.kind = LossKind::kLogistic;
  spec.dimension = 4;
  spec.batch = 2;
  spec.generator.points = 300;
  spec.generator.dimension = 4;
  spec.generator.label_noise = 0.1;
  spec.test_points = 100;
  const Problem p = MakeProblem(spec, 3, 1);
  ASSERT_TRUE(p.test_set);
  EXPECT_EQ(p.test_set->size(), 100u);
  EXPECT_EQ(p.source->batch_size(), 2);
  EXPECT_TRUE(p.grad_l1_bound.has_value());
  EXPECT_GE(p.objective->Gap(Eigen::VectorXd::Zero(4)), -1e-9);
}

TEST(MakeProblemTest, QuadraticWarnsAboutGradientBound) {
  ProblemSpec spec;
  spec.kind = LossKind::kQuadratic;
  spec.dimension = 3;
  spec.grad_l1_bound = 5.0;
  const Problem p = MakeProblem(spec, 4, 2);
  EXPECT_FALSE(p.warnings.empty());
  EXPECT_EQ(p.grad_l1_bound, 5.0);
  EXPECT_EQ(p.source->Draw(0, 3).front().target.size(), 3);
}

}  // namespace
}  // namespace ldpq::problems
