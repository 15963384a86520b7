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

#include "ldpq/metrics.h"

#include <cmath>
#include <random>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ldpq/error.h"
#include "testing/generators.h"

namespace ldpq::metrics {
namespace {

using ::testing::HasSubstr;

std::vector<Eigen::VectorXd> Scalars(std::initializer_list<double> values) {
  std::vector<Eigen::VectorXd> out;
  for (double v : values) out.push_back(Eigen::VectorXd::Constant(1, v));
  return out;
}

TEST(AverageThetaTest, Examples) {
  const std::vector<Eigen::VectorXd> two{Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)};
  EXPECT_EQ(AverageTheta(two, Eigen::Vector2d(1, 1)), Eigen::VectorXd(Eigen::Vector2d(2, 3)));

  const Eigen::Vector3d u(0.5, 1.5, 1.0);
  const auto equal = Scalars({-4.25, -4.25, -4.25});
  EXPECT_NEAR(AverageTheta(equal, u)(0), -4.25, 1e-15);
  EXPECT_NEAR(AverageTheta(Scalars({2, 0, 1}), u)(0), 2.0 / 3.0, 1e-15);
}

TEST(AverageThetaTest, UnitWeightsGiveArithmeticMean) {
  std::mt19937_64 gen(4);
  for (int c = 0; c < 100; ++c) {
    const int m = 2 + c % 6;
    std::vector<Eigen::VectorXd> thetas;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(3);
    for (int i = 0; i < m; ++i) {
      thetas.push_back(testing::RandomVector(gen, 3, 5.0));
      sum += thetas.back();
    }
    EXPECT_LE((AverageTheta(thetas, Eigen::VectorXd::Ones(m)) - sum / m).cwiseAbs().maxCoeff(),
              1e-14);
  }
}

TEST(ConsensusErrorsTest, ZeroAtConsensus) {
  const Eigen::Vector3d v(1.2, 0.9, 0.9);
  const Eigen::Vector2d c(0.3, -0.7);
  const std::vector<Eigen::VectorXd> thetas(3, c);
  // psi^i = v_i * s for a common s, so the plain mean of psi is s.
  const Eigen::Vector2d s(2.0, 1.0);
  const std::vector<Eigen::VectorXd> psis{v(0) * s, v(1) * s, v(2) * s};
  const ConsensusError e = ConsensusErrors(thetas, psis, Eigen::Vector3d(0.5, 1.5, 1.0), v);
  EXPECT_NEAR(e.theta, 0.0, 1e-15);
  EXPECT_NEAR(e.psi, 0.0, 1e-15);
}

TEST(ConsensusErrorsTest, SingleAgentOffByUnitVector) {
  // m = 2, u = (1,1): theta_bar = e1/2, deviations +-e1/2, norm sqrt(1/2).
  const std::vector<Eigen::VectorXd> thetas{Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 0)};
  const std::vector<Eigen::VectorXd> psis(2, Eigen::Vector2d::Zero());
  const ConsensusError e =
      ConsensusErrors(thetas, psis, Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 1));
  EXPECT_NEAR(e.theta, std::sqrt(0.5), 1e-15);
  EXPECT_EQ(e.psi, 0.0);
}

TEST(ConsensusErrorsTest, HomogeneousInScale) {
  std::mt19937_64 gen(8);
  std::vector<Eigen::VectorXd> thetas, psis, scaled;
  for (int i = 0; i < 4; ++i) {
    thetas.push_back(testing::RandomVector(gen, 3, 1.0));
    psis.push_back(testing::RandomVector(gen, 3, 1.0));
    scaled.push_back(-2.5 * thetas.back());
  }
  const Eigen::Vector4d u(0.8, 1.2, 1.0, 1.0);
  const Eigen::Vector4d v(1.0, 1.0, 1.5, 0.5);
  EXPECT_NEAR(ConsensusErrors(scaled, psis, u, v).theta,
              2.5 * ConsensusErrors(thetas, psis, u, v).theta, 1e-13);
}

TEST(ConsensusErrorsTest, ZeroOnlyAtConsensus) {
  std::mt19937_64 gen(10);
  const Eigen::Vector3d u(0.5, 1.5, 1.0), v(1.0, 0.5, 1.5);
  for (int c = 0; c < 50; ++c) {
    std::vector<Eigen::VectorXd> thetas(3, testing::RandomVector(gen, 2, 1.0));
    std::vector<Eigen::VectorXd> psis;
    const Eigen::VectorXd s = testing::RandomVector(gen, 2, 1.0);
    for (int i = 0; i < 3; ++i) psis.push_back(v(i) * s);
    EXPECT_NEAR(ConsensusErrors(thetas, psis, u, v).theta, 0.0, 1e-14);
    EXPECT_NEAR(ConsensusErrors(thetas, psis, u, v).psi, 0.0, 1e-14);
    thetas[c % 3](0) += 1e-3;
    psis[(c + 1) % 3](1) += 1e-3;
    EXPECT_GT(ConsensusErrors(thetas, psis, u, v).theta, 1e-5);
    EXPECT_GT(ConsensusErrors(thetas, psis, u, v).psi, 1e-5);
  }
}

TEST(ObjectiveGapTest, Quadratic) {
  problems::QuadraticObjective f({Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 2)}, 1.0);
  EXPECT_NEAR(ObjectiveGap(Eigen::Vector2d(1, 1), f), 0.0, 1e-15);
  EXPECT_NEAR(ObjectiveGap(Eigen::Vector2d(1.5, 1), f), 0.125, 1e-15);
}

TEST(MeanAccuracyTest, AveragesAgents) {
  problems::Corpus c;
  c.features = {Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)};
  c.labels = {1.0, -1.0};
  const std::vector<Eigen::VectorXd> thetas{Eigen::Vector2d(1, 0), Eigen::Vector2d(-1, 0)};
  EXPECT_DOUBLE_EQ(MeanAccuracy(thetas, c), 0.5);
}

TEST(TraceTest, RejectsNonIncreasingTimeAndNonFiniteValues) {
  MetricsTrace trace;
  trace.Append({0, 1, 1, 1, 1, 1, 0});
  try {
    trace.Append({0, 1, 1, 1, 1, 1, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kState);
  }
  TraceRow bad{5, 1, NAN, 1, 1, 1, 0};
  EXPECT_THROW(trace.Append(bad), Error);
  trace.Append({3, 1, 2, 3, 4, 5, 6});
  EXPECT_EQ(trace.Times(), (std::vector<double>{0, 3}));
  EXPECT_EQ(trace.Column("cons_psi"), (std::vector<double>{1, 5}));
  EXPECT_THROW(trace.Column("nope"), Error);
}

TEST(TraceTest, HeaderMatchesColumnsInOrder) {
  std::ostringstream os;
  WriteTraceHeader(os);
  EXPECT_EQ(os.str(), "t,F_bar,gap,grad_norm,cons_theta,cons_psi,max_delta\n");
  MetricsTrace trace;
  trace.Append({0, 0.5, 0.25, 0.1, 2, 3, 0});
  std::ostringstream rows;
  WriteTrace(rows, trace);
  EXPECT_THAT(rows.str(), HasSubstr("0,0.5,0.25,0.1,2,3,0\n"));
}

TEST(FormatDoubleTest, RoundTrips) {
  std::mt19937_64 gen(12);
  for (int c = 0; c < 1000; ++c) {
    const double x = std::ldexp(testing::UniformIn(gen, -1, 1), c % 200 - 100);
    EXPECT_EQ(std::stod(FormatDouble(x)), x);
  }
  EXPECT_EQ(FormatDouble(0.1), "0.1");
}

TEST(RateFitTest, ExactPowerLaws) {
  std::vector<double> x, inv, slow;
  for (int t = 1; t <= 2000; ++t) {
    x.push_back(t);
    inv.push_back(3.0 / t);
    slow.push_back(0.7 / std::pow(t, 0.29));
  }
  EXPECT_NEAR(RateFit(x, inv, 100, 2000), -1.0, 1e-6);
  EXPECT_NEAR(RateFit(x, slow, 100, 2000), -0.29, 1e-6);
}

TEST(RateFitTest, SkipsZerosAndNeedsTwoPoints) {
  const std::vector<double> x{1, 2, 4, 8};
  const std::vector<double> y{0, 0.5, 0.25, 0.0};
  EXPECT_NEAR(RateFit(x, y, 1, 8), -1.0, 1e-12);
  EXPECT_THROW(RateFit(x, y, 3, 8), Error);
}

TEST(RateFitTest, SquaredTraceColumn) {
  MetricsTrace trace;
  for (int t = 1; t <= 100; ++t) trace.Append({t, 0, 0, 0, 1.0 / std::sqrt(t), 0, 0});
  EXPECT_NEAR(RateFit(trace, "cons_theta", 10, 100, 2.0), -1.0, 1e-9);
  EXPECT_NEAR(RateFit(trace, "cons_theta", 10, 100), -0.5, 1e-9);
}

}  // namespace
}  // namespace ldpq::metrics
