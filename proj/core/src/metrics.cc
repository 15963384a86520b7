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

#include <charconv>
#include <cmath>
#include <ostream>

#include "ldpq/error.h"

namespace ldpq::metrics {

Eigen::VectorXd AverageTheta(const std::vector<Eigen::VectorXd>& thetas,
                             const Eigen::VectorXd& u) {
  if (thetas.empty() || static_cast<Eigen::Index>(thetas.size()) != u.size()) {
    throw Error(ErrorKind::kArgument, "weights and agent count differ");
  }
  Eigen::VectorXd avg = Eigen::VectorXd::Zero(thetas.front().size());
  for (std::size_t i = 0; i < thetas.size(); ++i) avg += u(i) * thetas[i];
  return avg / static_cast<double>(thetas.size());
}

ConsensusError ConsensusErrors(const std::vector<Eigen::VectorXd>& thetas,
                               const std::vector<Eigen::VectorXd>& psis,
                               const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v) {
  if (psis.size() != thetas.size() ||
      static_cast<Eigen::Index>(psis.size()) != v.size()) {
    throw Error(ErrorKind::kArgument, "weights and agent count differ");
  }
  const Eigen::VectorXd theta_bar = AverageTheta(thetas, u);
  Eigen::VectorXd psi_bar = Eigen::VectorXd::Zero(psis.front().size());
  for (const auto& p : psis) psi_bar += p;
  psi_bar /= static_cast<double>(psis.size());

  double st = 0.0;
  double sp = 0.0;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    st += (thetas[i] - theta_bar).squaredNorm();
    sp += (psis[i] - v(i) * psi_bar).squaredNorm();
  }
  return {std::sqrt(st), std::sqrt(sp)};
}

double ObjectiveGap(const Eigen::VectorXd& theta_bar,
                    const problems::Objective& objective) {
  return objective.Gap(theta_bar);
}

double MeanAccuracy(const std::vector<Eigen::VectorXd>& thetas,
                    const problems::Corpus& test_set) {
  if (thetas.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& theta : thetas) acc += problems::Accuracy(theta, test_set);
  return acc / static_cast<double>(thetas.size());
}

void MetricsTrace::Append(const TraceRow& row) {
  if (!rows_.empty() && row.t <= rows_.back().t) {
    throw Error(ErrorKind::kState, "trace rows must have increasing t");
  }
  for (double x : {row.f_bar, row.gap, row.grad_norm, row.cons_theta,
                   row.cons_psi, row.max_delta}) {
    if (!std::isfinite(x)) {
      throw Error(ErrorKind::kNumerical,
                  "non-finite diagnostic at t=" + std::to_string(row.t));
    }
  }
  rows_.push_back(row);
}

std::vector<double> MetricsTrace::Times() const { return Column("t"); }

std::vector<double> MetricsTrace::Column(std::string_view name) const {
  double TraceRow::*field = nullptr;
  if (name == "F_bar") field = &TraceRow::f_bar;
  else if (name == "gap") field = &TraceRow::gap;
  else if (name == "grad_norm") field = &TraceRow::grad_norm;
  else if (name == "cons_theta") field = &TraceRow::cons_theta;
  else if (name == "cons_psi") field = &TraceRow::cons_psi;
  else if (name == "max_delta") field = &TraceRow::max_delta;
  else if (name != "t") {
    throw Error(ErrorKind::kArgument, "unknown trace column '" + std::string(name) + "'");
  }
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& row : rows_) {
    out.push_back(field ? row.*field : static_cast<double>(row.t));
  }
  return out;
}

std::string FormatDouble(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

void WriteTraceHeader(std::ostream& out) {
  for (std::size_t k = 0; k < kTraceColumns.size(); ++k) {
    out << (k ? "," : "") << kTraceColumns[k];
  }
  out << '\n';
}

void WriteTraceRow(std::ostream& out, const TraceRow& row) {
  out << row.t << ',' << FormatDouble(row.f_bar) << ',' << FormatDouble(row.gap)
      << ',' << FormatDouble(row.grad_norm) << ','
      << FormatDouble(row.cons_theta) << ',' << FormatDouble(row.cons_psi)
      << ',' << FormatDouble(row.max_delta) << '\n';
}

void WriteTrace(std::ostream& out, const MetricsTrace& trace) {
  WriteTraceHeader(out);
  for (const auto& row : trace.rows()) WriteTraceRow(out, row);
}

double RateFit(const std::vector<double>& x, const std::vector<double>& y,
               double x_lo, double x_hi) {
  if (x.size() != y.size()) throw Error(ErrorKind::kArgument, "length mismatch");
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] < x_lo || x[k] > x_hi || x[k] <= 0.0 || !(y[k] > 0.0)) continue;
    const double lx = std::log(x[k]);
    const double ly = std::log(y[k]);
    n += 1;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || !(denom > 0.0)) {
    throw Error(ErrorKind::kArgument, "rate fit needs two distinct positive points");
  }
  return (n * sxy - sx * sy) / denom;
}

double RateFit(const MetricsTrace& trace, std::string_view column, double t_lo,
               double t_hi, double power) {
  std::vector<double> y = trace.Column(column);
  for (double& v : y) v = std::pow(v, power);
  return RateFit(trace.Times(), y, t_lo, t_hi);
}

}  // namespace ldpq::metrics
