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

#include "ldpq/quantizer.h"

#include <cmath>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "ldpq/error.h"
#include "ldpq/random.h"
#include "testing/generators.h"

namespace ldpq::quant {
namespace {

// Total variation from the two-point pmfs, independent of the subset
// enumeration: max_tau |P(tau) - Q(tau)| = (1/2) sum_x |p(x) - q(x)|.
double TotalVariation(double y, double y_prime, double d) {
  std::map<std::int64_t, double> diff;
  const auto add = [&](double v, double sign) {
    const double k = std::floor(v / d);
    const double frac = v / d - k;
    if (frac == 0.0) {
      diff[static_cast<std::int64_t>(k)] += sign;
    } else {
      diff[static_cast<std::int64_t>(k)] += sign * (1.0 - frac);
      diff[static_cast<std::int64_t>(k) + 1] += sign * frac;
    }
  };
  add(y, 1.0);
  add(y_prime, -1.0);
  double total = 0.0;
  for (const auto& [level, mass] : diff) total += std::abs(mass);
  return 0.5 * total;
}

TEST(DecomposeTest, Examples) {
  Decomposition a = Decompose(0.7, 1.0);
  EXPECT_EQ(a.n, 0);
  EXPECT_DOUBLE_EQ(a.z, 0.7);
  Decomposition b = Decompose(3.0, 1.0);
  EXPECT_EQ(b.n, 2);
  EXPECT_DOUBLE_EQ(b.z, 1.0);
  Decomposition c = Decompose(-0.25, 0.5);
  EXPECT_EQ(c.n, -1);
  EXPECT_DOUBLE_EQ(c.z, 0.25);
  Decomposition zero = Decompose(0.0, 0.5);
  EXPECT_EQ(zero.n, -1);
  EXPECT_DOUBLE_EQ(zero.z, 0.5);
}

TEST(DecomposeTest, RejectsBadInputs) {
  EXPECT_THROW(Decompose(std::nan(""), 1.0), Error);
  EXPECT_THROW(Decompose(INFINITY, 1.0), Error);
  EXPECT_THROW(Decompose(1.0, 0.0), Error);
  EXPECT_THROW(Decompose(1.0, -2.0), Error);
}

TEST(DecomposeTest, RandomInputsLandInHalfOpenInterval) {
  std::mt19937_64 gen(1);
  for (int c = 0; c < 20000; ++c) {
    const double d = std::exp(testing::UniformIn(gen, -8.0, 3.0));
    double y = testing::UniformIn(gen, -50.0, 50.0);
    if (c % 5 == 0) y = std::round(y / d) * d;  // lattice points
    const Decomposition dec = Decompose(y, d);
    ASSERT_GT(dec.z, 0.0) << y << " " << d;
    ASSERT_LE(dec.z, d);
    ASSERT_NEAR(static_cast<double>(dec.n) * d + dec.z, y,
                1e-12 * std::max(1.0, std::abs(y)));
  }
}

TEST(QuantizeTest, ExactMultipleIsDeterministic) {
  RandomStream s(3);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(Quantize(3.0, 1.0, s), 3.0);
  EXPECT_EQ(s.uniforms_drawn(), 1000u);
}

TEST(QuantizeTest, OutputsStayOnDecompositionLevels) {
  std::mt19937_64 gen(9);
  RandomStream s(9);
  for (int c = 0; c < 5000; ++c) {
    const double d = testing::UniformIn(gen, 0.01, 4.0);
    const double y = testing::UniformIn(gen, -20.0, 20.0);
    const Decomposition dec = Decompose(y, d);
    const double q = Quantize(y, d, s);
    const bool lower = q == static_cast<double>(dec.n) * d;
    const bool upper = q == static_cast<double>(dec.n + 1) * d;
    ASSERT_TRUE(lower || upper) << y << " " << d << " -> " << q;
  }
}

TEST(QuantizeTest, FrequenciesFollowPmf) {
  // (0.7, 1) -> 1 w.p. 0.7; (-0.25, 0.5) -> 0 w.p. 0.5.
  RandomStream s(17);
  constexpr int kDraws = 200000;
  int ones = 0;
  int zeros = 0;
  for (int k = 0; k < kDraws; ++k) {
    if (Quantize(0.7, 1.0, s) == 1.0) ++ones;
    if (Quantize(-0.25, 0.5, s) == 0.0) ++zeros;
  }
  const double sigma7 = std::sqrt(0.7 * 0.3 / kDraws);
  const double sigma5 = std::sqrt(0.25 / kDraws);
  EXPECT_NEAR(static_cast<double>(ones) / kDraws, 0.7, 5 * sigma7);
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, 0.5, 5 * sigma5);
}

TEST(QuantizeTest, SampleMeanWithinThreeSigma) {
  // |mean - y| <= 3 (d/2) / sqrt(N).
  constexpr int kDraws = 1000000;
  const double tolerance = 3.0 * 0.5 / std::sqrt(static_cast<double>(kDraws));
  for (double y : {-1.3, 0.7, 2.0, 3.0}) {
    RandomStream s(101);
    double sum = 0.0;
    for (int k = 0; k < kDraws; ++k) sum += Quantize(y, 1.0, s);
    EXPECT_NEAR(sum / kDraws, y, tolerance) << y;
  }
}

TEST(QuantizeTest, SameStreamSameOutputs) {
  RandomStream a(42);
  RandomStream b(42);
  for (int k = 0; k < 1000; ++k) {
    const double y = 0.013 * k - 4.0;
    ASSERT_EQ(Quantize(y, 0.37, a), Quantize(y, 0.37, b));
  }
}

TEST(QuantizeVectorTest, ExactMultiplesPassThrough) {
  RandomStream s(1);
  const Eigen::Vector2d y(1.0, 2.0);
  EXPECT_EQ(QuantizeVector(y, 1.0, s), y);
  EXPECT_EQ(s.uniforms_drawn(), 2u);
}

TEST(QuantizeVectorTest, EmptyConsumesNothing) {
  RandomStream s(1);
  EXPECT_EQ(QuantizeVector(Eigen::VectorXd(), 1.0, s).size(), 0);
  EXPECT_EQ(s.uniforms_drawn(), 0u);
}

TEST(QuantizeVectorTest, CoordinatesAreIndependent) {
  // (0.5, 0.5) with d = 1: joint outcome (0, 1) has probability 1/4.
  RandomStream s(5);
  constexpr int kDraws = 200000;
  int hits = 0;
  for (int k = 0; k < kDraws; ++k) {
    const Eigen::VectorXd q = QuantizeVector(Eigen::Vector2d(0.5, 0.5), 1.0, s);
    if (q(0) == 0.0 && q(1) == 1.0) ++hits;
  }
  EXPECT_NEAR(static_cast<double>(hits) / kDraws, 0.25,
              5 * std::sqrt(0.25 * 0.75 / kDraws));
}

TEST(QuantizeVectorTest, MatchesScalarCallsInCoordinateOrder) {
  RandomStream a(8);
  RandomStream b(8);
  const Eigen::Vector4d y(0.3, -1.7, 2.25, 9.1);
  const Eigen::VectorXd q = QuantizeVector(y, 0.4, a);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(q(k), Quantize(y(k), 0.4, b));
}

TEST(StepsizeTest, Examples) {
  const QuantSchedule s{2.01, 0.61};
  EXPECT_DOUBLE_EQ(Stepsize(0, s), 2.01);
  EXPECT_NEAR(Stepsize(3, s), 2.01 / std::pow(4.0, 0.61), 1e-15);
  // Commonly quoted as 0.8634; the formula gives 0.86286.
  EXPECT_NEAR(Stepsize(3, s), 0.8634, 1e-3);
  EXPECT_THROW(Stepsize(-1, s), Error);
}

TEST(StepsizeTest, StrictlyDecreasingAndPositive) {
  for (double vs : {0.51, 0.6, 0.75, 0.99}) {
    const QuantSchedule s{3.0, vs};
    double prev = Stepsize(0, s);
    for (int t = 1; t < 100000; t += 7) {
      const double d = Stepsize(t, s);
      ASSERT_GT(d, 0.0);
      ASSERT_LT(d, prev);
      prev = d;
    }
  }
}

TEST(OutcomeTest, Examples) {
  const QuantOutcome a = OutcomeDistribution(0.7, 1.0);
  EXPECT_EQ(a.lower, 0.0);
  EXPECT_EQ(a.upper, 1.0);
  EXPECT_NEAR(a.p_lower, 0.3, 1e-15);
  EXPECT_NEAR(a.p_upper, 0.7, 1e-15);
  const QuantOutcome b = OutcomeDistribution(0.4, 0.4);
  EXPECT_EQ(b.lower, 0.0);
  EXPECT_EQ(b.upper, 0.4);
  EXPECT_EQ(b.p_lower, 0.0);
  EXPECT_EQ(b.p_upper, 1.0);
}

TEST(OutcomeTest, MeanIsInputAndVarianceBounded) {
  std::mt19937_64 gen(1000);
  for (int c = 0; c < 1000; ++c) {
    const double d = testing::UniformIn(gen, 0.05, 5.0);
    const double y = testing::UniformIn(gen, -10.0, 10.0);
    const QuantOutcome o = OutcomeDistribution(y, d);
    ASSERT_GE(o.p_lower, 0.0);
    ASSERT_GE(o.p_upper, 0.0);
    ASSERT_NEAR(o.p_lower + o.p_upper, 1.0, 1e-15);
    ASSERT_NEAR(o.Mean(), y, 1e-14 * std::max(1.0, std::abs(y) / d));
    const double z = Decompose(y, d).z;
    ASSERT_NEAR(o.Variance(), z * (d - z), 1e-12 * d * d);
    ASSERT_LE(o.Variance(), d * d / 4 + 1e-15);
  }
}

TEST(SubsetGapTest, Examples) {
  EXPECT_NEAR(SubsetProbabilityGap(0.2, 0.5, 1.0), 0.3, 1e-15);
  EXPECT_EQ(SubsetProbabilityGap(0.37, 0.37, 0.5), 0.0);
  const double straddle = SubsetProbabilityGap(0.9, 1.1, 1.0);
  EXPECT_LE(straddle, 0.2 + 1e-12);
  EXPECT_NEAR(straddle, TotalVariation(0.9, 1.1, 1.0), 1e-12);
}

TEST(SubsetGapTest, RequiresCloseInputs) {
  try {
    SubsetProbabilityGap(0.0, 1.0, 1.0);
    FAIL() << "expected a precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kPrecondition);
  }
}

TEST(SubsetGapTest, AgreesWithTotalVariationAndBound) {
  std::mt19937_64 gen(6);
  for (int c = 0; c < 10000; ++c) {
    const double d = testing::UniformIn(gen, 0.1, 3.0);
    const double y = testing::UniformIn(gen, -5.0, 5.0);
    const double y_prime = y + testing::UniformIn(gen, -0.999, 0.999) * d;
    const double gap = SubsetProbabilityGap(y, y_prime, d);
    ASSERT_NEAR(gap, TotalVariation(y, y_prime, d), 1e-9) << y << " " << y_prime;
    ASSERT_LE(gap, std::abs(y - y_prime) / d + 1e-12);
  }
}

}  // namespace
}  // namespace ldpq::quant
