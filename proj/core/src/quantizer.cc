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

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "ldpq/error.h"

namespace ldpq::quant {
namespace {

constexpr double kMaxLatticeIndex = 0x1.0p52;

void CheckInputs(double y, double d) {
  if (!std::isfinite(y)) {
    throw Error(ErrorKind::kArgument, "quantizer input is not finite");
  }
  if (!(d > 0.0) || !std::isfinite(d)) {
    std::ostringstream os;
    os << "quantization stepsize must be positive and finite, got " << d;
    throw Error(ErrorKind::kArgument, os.str());
  }
}

}  // namespace

double QuantSchedule::StepAt(int t) const {
  return d0 / std::pow(static_cast<double>(t) + 1.0, varsigma);
}

double Stepsize(int t, const QuantSchedule& schedule) {
  if (t < 0) throw Error(ErrorKind::kArgument, "round index must be >= 0");
  return schedule.StepAt(t);
}

Decomposition Decompose(double y, double d) {
  CheckInputs(y, d);
  const double ratio = y / d;
  if (std::abs(ratio) > kMaxLatticeIndex) {
    throw Error(ErrorKind::kArgument, "input too large relative to stepsize");
  }
  // Smallest n with y - n*d <= d, i.e. n = ceil(y/d) - 1; the two loops
  // repair rounding in y/d so that z lands in (0, d].
  auto n = static_cast<std::int64_t>(std::ceil(ratio)) - 1;
  double z = y - static_cast<double>(n) * d;
  while (z > d) {
    ++n;
    z = y - static_cast<double>(n) * d;
  }
  while (z <= 0.0) {
    --n;
    z = y - static_cast<double>(n) * d;
  }
  return {n, std::min(z, d)};
}

double QuantOutcome::Variance() const {
  const double mean = Mean();
  return p_lower * (lower - mean) * (lower - mean) +
         p_upper * (upper - mean) * (upper - mean);
}

QuantOutcome OutcomeDistribution(double y, double d) {
  const Decomposition dec = Decompose(y, d);
  QuantOutcome out;
  out.lower = static_cast<double>(dec.n) * d;
  out.upper = static_cast<double>(dec.n + 1) * d;
  out.p_upper = dec.z / d;
  out.p_lower = 1.0 - out.p_upper;
  return out;
}

double Quantize(double y, double d, RandomStream& stream) {
  const Decomposition dec = Decompose(y, d);
  const double u = stream.Uniform();
  const std::int64_t level = u < dec.z / d ? dec.n + 1 : dec.n;
  return static_cast<double>(level) * d;
}

Eigen::VectorXd QuantizeVector(const Eigen::VectorXd& y, double d,
                               RandomStream& stream) {
  Eigen::VectorXd out(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) out(k) = Quantize(y(k), d, stream);
  return out;
}

double SubsetProbabilityGap(double y, double y_prime, double d) {
  CheckInputs(y, d);
  CheckInputs(y_prime, d);
  if (!(std::abs(y - y_prime) < d)) {
    throw Error(ErrorKind::kPrecondition,
                "subset gap requires |y - y'| < d");
  }
  const Decomposition a = Decompose(y, d);
  const Decomposition b = Decompose(y_prime, d);

  // Lattice indices carrying mass under either input (at most four).
  std::array<std::int64_t, 4> levels{a.n, a.n + 1, b.n, b.n + 1};
  std::sort(levels.begin(), levels.end());
  const auto count = static_cast<int>(
      std::unique(levels.begin(), levels.end()) - levels.begin());

  auto mass = [d](const Decomposition& dec, std::int64_t level) {
    const double p_upper = dec.z / d;
    if (level == dec.n) return 1.0 - p_upper;
    if (level == dec.n + 1) return p_upper;
    return 0.0;
  };

  double gap = 0.0;
  for (unsigned subset = 0; subset < (1u << count); ++subset) {
    double p = 0.0;
    double q = 0.0;
    for (int k = 0; k < count; ++k) {
      if (subset & (1u << k)) {
        p += mass(a, levels[k]);
        q += mass(b, levels[k]);
      }
    }
    gap = std::max(gap, std::abs(p - q));
  }
  return gap;
}

}  // namespace ldpq::quant
