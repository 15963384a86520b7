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

#ifndef LDPQ_QUANTIZER_H_
#define LDPQ_QUANTIZER_H_

#include <cstdint>

#include <Eigen/Dense>

#include "ldpq/random.h"

namespace ldpq::quant {

// Decaying lattice spacing d_t = d0 / (t+1)^varsigma.
struct QuantSchedule {
  double d0 = 1.0;
  double varsigma = 0.75;

  double StepAt(int t) const;
};

// Same as schedule.StepAt(t); throws Error(kArgument) for t < 0.
double Stepsize(int t, const QuantSchedule& schedule);

// y = n * d + z with z in (0, d].
struct Decomposition {
  std::int64_t n = 0;
  double z = 0.0;
};

// Throws Error(kArgument) for non-finite y, d <= 0, or |y/d| beyond 2^52.
Decomposition Decompose(double y, double d);

// Exact two-point law of the quantizer output: lower = n*d with probability
// 1 - z/d, upper = (n+1)*d with probability z/d.
struct QuantOutcome {
  double lower = 0.0;
  double upper = 0.0;
  double p_lower = 1.0;
  double p_upper = 0.0;

  double Mean() const { return p_lower * lower + p_upper * upper; }
  double Variance() const;
};

QuantOutcome OutcomeDistribution(double y, double d);

// Unbiased stochastic rounding of y onto the lattice d*Z. Consumes exactly
// one uniform variate from `stream`.
double Quantize(double y, double d, RandomStream& stream);

// Coordinate-wise Quantize with independent variates, consumed in coordinate
// order.
Eigen::VectorXd QuantizeVector(const Eigen::VectorXd& y, double d,
                               RandomStream& stream);

// Largest total-variation gap max_tau |P(Q(y) in tau) - P(Q(y') in tau)| over
// subsets of the joint support, by exhaustive enumeration. Requires
// |y - y'| < d (Error(kPrecondition) otherwise); the result never exceeds
// |y - y'| / d.
double SubsetProbabilityGap(double y, double y_prime, double d);

}  // namespace ldpq::quant

#endif  // LDPQ_QUANTIZER_H_
