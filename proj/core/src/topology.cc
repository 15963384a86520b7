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

#include "ldpq/topology.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ldpq/error.h"

namespace ldpq::topology {
namespace {

constexpr double kMinRate = 1e-3;

std::string Entry(const char* name, int i, int j, double value) {
  std::ostringstream os;
  os << name << "(" << i << "," << j << ") = " << value;
  return os.str();
}

void CheckSquare(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << name << " is " << m.rows() << "x" << m.cols() << ", expected square";
    throw Error(ErrorKind::kStructural, os.str());
  }
}

// Solves A x = 0 with 1^T x = m in the least-squares sense; A is R^T or C.
Eigen::VectorXd NormalizedNullVector(const Eigen::MatrixXd& a,
                                     const char* what) {
  const Eigen::Index m = a.rows();
  Eigen::MatrixXd system(m + 1, m);
  system.topRows(m) = a;
  system.row(m).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
  rhs(m) = static_cast<double>(m);

  Eigen::VectorXd x = system.colPivHouseholderQr().solve(rhs);
  const double residual = (system * x - rhs).lpNorm<Eigen::Infinity>();
  if (!x.allFinite() || residual > kEigenTolerance) {
    std::ostringstream os;
    os << what << " eigenvector solve did not converge, residual "
       << residual;
    throw Error(ErrorKind::kNumerical, os.str());
  }
  if (x.minCoeff() < -kEigenTolerance) {
    std::ostringstream os;
    os << what << " eigenvector has negative entry " << x.minCoeff();
    throw Error(ErrorKind::kNumerical, os.str());
  }
  return x.cwiseMax(0.0);
}

}  // namespace

bool ValidationReport::Failed(const std::string& id) const {
  return std::any_of(failures.begin(), failures.end(),
                     [&](const ConditionFailure& f) { return f.id == id; });
}

std::string ValidationReport::ToString() const {
  std::ostringstream os;
  if (passed()) {
    os << "topology: PASS";
  } else {
    os << "topology: FAIL (" << failures.size() << " condition"
       << (failures.size() == 1 ? "" : "s") << ")";
  }
  os << "\n";
  for (const auto& f : failures) os << "  [" << f.id << "] " << f.detail << "\n";
  auto list = [&](const char* label, const std::vector<int>& roots) {
    os << "  " << label << ":";
    if (roots.empty()) os << " none";
    for (int r : roots) os << " " << r;
    os << "\n";
  };
  list("spanning-tree roots in G_R", roots_r);
  list("spanning-tree roots in G_{C^T}", roots_ct);
  return os.str();
}

std::vector<std::vector<int>> GraphOfR(const Eigen::MatrixXd& r) {
  const int m = static_cast<int>(r.rows());
  std::vector<std::vector<int>> out(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i != j && r(i, j) > 0.0) out[j].push_back(i);
    }
  }
  return out;
}

std::vector<std::vector<int>> GraphOfCTranspose(const Eigen::MatrixXd& c) {
  return GraphOfR(c.transpose());
}

std::vector<int> SpanningTreeRoots(const std::vector<std::vector<int>>& out) {
  const int m = static_cast<int>(out.size());
  std::vector<int> roots;
  std::vector<int> stack;
  for (int root = 0; root < m; ++root) {
    std::vector<bool> seen(m, false);
    seen[root] = true;
    stack.assign(1, root);
    int reached = 1;
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      for (int next : out[node]) {
        if (!seen[next]) {
          seen[next] = true;
          ++reached;
          stack.push_back(next);
        }
      }
    }
    if (reached == m) roots.push_back(root);
  }
  return roots;
}

ValidationReport Validate(const WeightMatrices& w) {
  CheckSquare(w.R, "R");
  CheckSquare(w.C, "C");
  if (w.R.rows() != w.C.rows()) {
    throw Error(ErrorKind::kStructural, "R and C have different dimensions");
  }
  if (w.R.rows() < 2) {
    throw Error(ErrorKind::kStructural, "at least two agents are required");
  }
  if (!w.R.allFinite() || !w.C.allFinite()) {
    throw Error(ErrorKind::kStructural, "weight matrices contain non-finite entries");
  }

  ValidationReport report;
  auto fail = [&](const char* id, std::string detail) {
    report.failures.push_back({id, std::move(detail)});
  };
  const int m = w.agents();

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      if (w.R(i, j) < 0.0) fail(condition::kROffDiagonalSign, Entry("R", i, j, w.R(i, j)));
      if (w.C(i, j) < 0.0) fail(condition::kCOffDiagonalSign, Entry("C", i, j, w.C(i, j)));
    }
    if (!(w.R(i, i) < 0.0)) fail(condition::kRDiagonalSign, Entry("R", i, i, w.R(i, i)));
    if (!(w.C(i, i) < 0.0)) fail(condition::kCDiagonalSign, Entry("C", i, i, w.C(i, i)));
    if (!(1.0 + w.R(i, i) > 0.0)) {
      fail(condition::kRSelfWeight, "1 + " + Entry("R", i, i, w.R(i, i)) + " is not positive");
    }
    if (!(1.0 + w.C(i, i) > 0.0)) {
      fail(condition::kCSelfWeight, "1 + " + Entry("C", i, i, w.C(i, i)) + " is not positive");
    }
    const double row = w.R.row(i).sum();
    if (std::abs(row) > kSumTolerance) {
      std::ostringstream os;
      os << "row " << i << " of R sums to " << row;
      fail(condition::kRowSum, os.str());
    }
    const double col = w.C.col(i).sum();
    if (std::abs(col) > kSumTolerance) {
      std::ostringstream os;
      os << "column " << i << " of C sums to " << col;
      fail(condition::kColumnSum, os.str());
    }
  }

  report.roots_r = SpanningTreeRoots(GraphOfR(w.R));
  report.roots_ct = SpanningTreeRoots(GraphOfCTranspose(w.C));
  if (report.roots_r.empty()) {
    fail(condition::kSpanningTreeR, "G_R contains no spanning tree");
  }
  if (report.roots_ct.empty()) {
    fail(condition::kSpanningTreeCT, "G_{C^T} contains no spanning tree");
  }
  if (!report.roots_r.empty() && !report.roots_ct.empty()) {
    std::vector<int> common;
    std::set_intersection(report.roots_r.begin(), report.roots_r.end(),
                          report.roots_ct.begin(), report.roots_ct.end(),
                          std::back_inserter(common));
    if (common.empty()) {
      fail(condition::kCommonRoot, "no agent roots spanning trees in both G_R and G_{C^T}");
    }
  }
  return report;
}

Eigen::VectorXd LeftEigenvector(const Eigen::MatrixXd& r) {
  CheckSquare(r, "R");
  return NormalizedNullVector(r.transpose(), "left");
}

Eigen::VectorXd RightEigenvector(const Eigen::MatrixXd& c) {
  CheckSquare(c, "C");
  return NormalizedNullVector(c, "right");
}

Eigen::MatrixXd EigenEstimationStep(const Eigen::MatrixXd& r,
                                    const Eigen::MatrixXd& z) {
  const Eigen::Index m = r.rows();
  Eigen::MatrixXd next = z;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i || r(i, j) == 0.0) continue;
      next.row(i) += r(i, j) * (z.row(j) - z.row(i));
    }
  }
  return next;
}

double ConsensusSpectralRadius(const Eigen::MatrixXd& r) {
  const Eigen::Index m = r.rows();
  const Eigen::VectorXd u = LeftEigenvector(r);
  Eigen::MatrixXd centered = Eigen::MatrixXd::Identity(m, m) + r -
                             Eigen::VectorXd::Ones(m) * u.transpose() /
                                 static_cast<double>(m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(centered, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kNumerical, "eigenvalue solve failed");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

GeometricFit EstimateGeometricConstants(const WeightMatrices& w, int horizon) {
  if (horizon < 10) {
    throw Error(ErrorKind::kArgument, "geometric fit horizon must be >= 10");
  }
  const int m = w.agents();
  const Eigen::VectorXd u = LeftEigenvector(w.R);
  if (u.minCoeff() <= 0.0) {
    throw Error(ErrorKind::kStructural,
                "left eigenvector has a zero entry; 1/u_i is undefined");
  }
  const Eigen::ArrayXd inv_u = u.cwiseInverse().array();
  const double floor =
      256.0 * std::numeric_limits<double>::epsilon() * inv_u.maxCoeff();

  GeometricFit fit;
  fit.errors.assign(horizon + 1, 0.0);
  std::vector<bool> reached(m, false);
  Eigen::MatrixXd z = Eigen::MatrixXd::Identity(m, m);
  for (int t = 0; t <= horizon; ++t) {
    double e = 0.0;
    for (int i = 0; i < m; ++i) {
      const double zii = z(i, i);
      if (!(zii > 0.0)) continue;
      reached[i] = true;
      e = std::max(e, std::abs(1.0 / (m * zii) - inv_u(i)));
    }
    fit.errors[t] = e;
    if (t < horizon) z = EigenEstimationStep(w.R, z);
  }
  for (int i = 0; i < m; ++i) {
    if (!reached[i]) {
      throw Error(ErrorKind::kStructural,
                  "agent " + std::to_string(i) +
                      " never has a positive self-estimate within the horizon");
    }
  }

  int last = -1;
  for (int t = 0; t <= horizon; ++t) {
    if (fit.errors[t] > floor) last = t;
  }
  fit.horizon = std::max(last, 0);

  double rate = 0.0;
  for (int t = (last + 1) / 2; t < last; ++t) {
    if (fit.errors[t] > floor && fit.errors[t + 1] > floor) {
      rate = std::max(rate, fit.errors[t + 1] / fit.errors[t]);
    }
  }
  if (!(rate > 0.0 && rate < 1.0)) {
    rate = ConsensusSpectralRadius(w.R);
    if (!(rate < 1.0)) {
      throw Error(ErrorKind::kStructural,
                  "I + R - 1u^T/m is not contractive; eigenvector estimates do not converge");
    }
    fit.rate_from_spectrum = true;
  }
  fit.rate = std::clamp(rate, kMinRate, 1.0 - 1e-12);

  double amplitude = 0.0;
  double power = 1.0;
  for (int t = 0; t <= fit.horizon; ++t) {
    if (fit.errors[t] > 0.0) amplitude = std::max(amplitude, fit.errors[t] / power);
    power *= fit.rate;
  }
  fit.amplitude = amplitude;
  return fit;
}

WeightMatrices Ring(int agents, double weight) {
  if (agents < 2 || !(weight > 0.0 && weight < 1.0)) {
    throw Error(ErrorKind::kArgument, "ring needs >= 2 agents and weight in (0,1)");
  }
  WeightMatrices w;
  w.R = Eigen::MatrixXd::Zero(agents, agents);
  w.C = Eigen::MatrixXd::Zero(agents, agents);
  for (int i = 0; i < agents; ++i) {
    const int prev = (i + agents - 1) % agents;
    w.R(i, i) = -weight;
    w.R(i, prev) = weight;
    w.C(i, i) = -weight;
    w.C((i + 1) % agents, i) = weight;
  }
  return w;
}

WeightMatrices ThreeNodeExample() {
  WeightMatrices w;
  w.R.resize(3, 3);
  w.R << -0.6, 0.6, 0.0,
          0.0, -0.2, 0.2,
          0.3, 0.0, -0.3;
  w.C = w.R.transpose();
  return w;
}

WeightMatrices FiveNodeExample() {
  WeightMatrices w;
  w.R.resize(5, 5);
  w.R << -0.15, 0.0, 0.06, 0.0, 0.09,
          0.12, -0.12, 0.0, 0.0, 0.0,
          0.0, 0.09, -0.15, 0.0, 0.06,
          0.0, 0.0, 0.15, -0.15, 0.0,
          0.045, 0.0, 0.0, 0.105, -0.15;
  w.C.resize(5, 5);
  w.C << -0.4, 0.0, 0.0, 0.2, 0.4,
          0.4, -0.5, 0.0, 0.0, 0.0,
          0.0, 0.3, -0.45, 0.0, 0.0,
          0.0, 0.2, 0.45, -0.5, 0.0,
          0.0, 0.0, 0.0, 0.3, -0.4;
  return w;
}

}  // namespace ldpq::topology
