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

#ifndef LDPQ_METRICS_H_
#define LDPQ_METRICS_H_

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ldpq/problems.h"

namespace ldpq::metrics {

// sum_i u_i theta^i / m.
Eigen::VectorXd AverageTheta(const std::vector<Eigen::VectorXd>& thetas,
                             const Eigen::VectorXd& u);

struct ConsensusError {
  double theta = 0.0;
  double psi = 0.0;
};

// ||theta - 1 (x) theta_bar||_2 with the u-weighted average, and
// ||psi - v (x) psi_bar||_2 with psi_bar the plain mean of the psi^i.
ConsensusError ConsensusErrors(const std::vector<Eigen::VectorXd>& thetas,
                               const std::vector<Eigen::VectorXd>& psis,
                               const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v);

// F(theta_bar) - F*.
double ObjectiveGap(const Eigen::VectorXd& theta_bar,
                    const problems::Objective& objective);

// Mean over agents of the held-out accuracy of each theta^i.
double MeanAccuracy(const std::vector<Eigen::VectorXd>& thetas,
                    const problems::Corpus& test_set);

struct TraceRow {
  int t = 0;
  double f_bar = 0.0;
  double gap = 0.0;
  double grad_norm = 0.0;
  double cons_theta = 0.0;
  double cons_psi = 0.0;
  double max_delta = 0.0;
};

inline constexpr std::array<std::string_view, 7> kTraceColumns = {
    "t", "F_bar", "gap", "grad_norm", "cons_theta", "cons_psi", "max_delta"};

class MetricsTrace {
 public:
  // Throws Error(kState) unless t increases strictly, Error(kNumerical) on a
  // non-finite entry.
  void Append(const TraceRow& row);

  const std::vector<TraceRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const TraceRow& back() const { return rows_.back(); }

  std::vector<double> Times() const;
  // Column by its header name; Error(kArgument) for unknown names.
  std::vector<double> Column(std::string_view name) const;

 private:
  std::vector<TraceRow> rows_;
};

// Shortest round-trip decimal form; identical bits print identically.
std::string FormatDouble(double value);

void WriteTraceHeader(std::ostream& out);
void WriteTraceRow(std::ostream& out, const TraceRow& row);
void WriteTrace(std::ostream& out, const MetricsTrace& trace);

// Least-squares slope of log(y) against log(x) over x in [x_lo, x_hi];
// points with y <= 0 or x <= 0 are skipped. Error(kArgument) with fewer than
// two usable points.
double RateFit(const std::vector<double>& x, const std::vector<double>& y,
               double x_lo, double x_hi);
// Same on a trace column raised to `power` (2 fits the squared column).
double RateFit(const MetricsTrace& trace, std::string_view column, double t_lo,
               double t_hi, double power = 1.0);

}  // namespace ldpq::metrics

#endif  // LDPQ_METRICS_H_
