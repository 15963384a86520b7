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

#ifndef LDPQ_TOPOLOGY_H_
#define LDPQ_TOPOLOGY_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ldpq::topology {

// Tolerance on the zero row sums of R and zero column sums of C.
inline constexpr double kSumTolerance = 1e-12;
// Tolerance on eigenvector residuals and normalization.
inline constexpr double kEigenTolerance = 1e-10;

// The two mixing matrices of the push-pull scheme. R pulls decision
// variables along G_R (edge j->i iff R(i,j) > 0, zero row sums); C pushes
// gradient-tracking variables along G_C (edge j->i iff C(i,j) > 0, zero
// column sums).
struct WeightMatrices {
  Eigen::MatrixXd R;
  Eigen::MatrixXd C;

  int agents() const { return static_cast<int>(R.rows()); }
};

// Identifiers of the conditions checked by Validate().
namespace condition {
inline constexpr char kROffDiagonalSign[] = "R-offdiag-nonnegative";
inline constexpr char kCOffDiagonalSign[] = "C-offdiag-nonnegative";
inline constexpr char kRDiagonalSign[] = "R-diag-negative";
inline constexpr char kCDiagonalSign[] = "C-diag-negative";
inline constexpr char kRowSum[] = "row-sum";
inline constexpr char kColumnSum[] = "col-sum";
inline constexpr char kRSelfWeight[] = "R-self-weight";
inline constexpr char kCSelfWeight[] = "C-self-weight";
inline constexpr char kSpanningTreeR[] = "spanning-tree-GR";
inline constexpr char kSpanningTreeCT[] = "spanning-tree-GCT";
inline constexpr char kCommonRoot[] = "common-root";
}  // namespace condition

struct ConditionFailure {
  std::string id;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionFailure> failures;
  // Agents that root a spanning tree in each induced graph.
  std::vector<int> roots_r;
  std::vector<int> roots_ct;

  bool passed() const { return failures.empty(); }
  bool Failed(const std::string& id) const;
  std::string ToString() const;
};

// Checks sign, sum and self-weight conditions and the spanning-tree
// requirements on G_R and G_{C^T}. Throws Error(kStructural) on dimension
// mismatch or m < 2; every other violation is reported, not thrown.
ValidationReport Validate(const WeightMatrices& w);

// Adjacency of G_R: result[j] lists the i with an edge j->i (R(i,j) > 0).
std::vector<std::vector<int>> GraphOfR(const Eigen::MatrixXd& r);
// Adjacency of G_{C^T}: edge j->i iff C(j,i) > 0.
std::vector<std::vector<int>> GraphOfCTranspose(const Eigen::MatrixXd& c);
// Nodes from which every node is reachable.
std::vector<int> SpanningTreeRoots(const std::vector<std::vector<int>>& out);

// Nonnegative u with u^T (I+R) = u^T and u^T 1 = m, from the null space of
// R^T. Throws Error(kNumerical) when the residual exceeds kEigenTolerance.
Eigen::VectorXd LeftEigenvector(const Eigen::MatrixXd& r);
// Nonnegative v with (I+C) v = v and 1^T v = m.
Eigen::VectorXd RightEigenvector(const Eigen::MatrixXd& c);

// One step of the eigenvector-estimation recursion applied to every agent:
// z^i <- z^i + sum_{j != i} R(i,j) (z^j - z^i). Row i of `z` holds z^i.
// The engine uses this same routine so trajectories agree bit for bit.
Eigen::MatrixXd EigenEstimationStep(const Eigen::MatrixXd& r,
                                    const Eigen::MatrixXd& z);

// Geometric envelope |1/(m [z_t^i]_i) - 1/u_i| <= amplitude * rate^t.
struct GeometricFit {
  double amplitude = 0.0;  // C_z
  double rate = 0.5;       // P_z, in (0, 1)
  // Last round whose error was above the floating-point floor; the envelope
  // is guaranteed to dominate every observation up to this round.
  int horizon = 0;
  bool rate_from_spectrum = false;
  std::vector<double> errors;  // e_t for t = 0..requested horizon
};

// Runs z_{t+1} = (I+R) z_t from Z_0 = I and fits the smallest-amplitude
// envelope. The rate is the largest consecutive error ratio over the tail
// half of the informative range; when no ratio is usable it falls back to
// the spectral radius of I + R - 1 u^T / m. Requires horizon >= 10.
GeometricFit EstimateGeometricConstants(const WeightMatrices& w, int horizon);

// Spectral radius of I + R - 1 u^T / m.
double ConsensusSpectralRadius(const Eigen::MatrixXd& r);

// Built-in topologies.
// Directed ring 0->1->...->m-1->0 for both graphs with uniform weight.
WeightMatrices Ring(int agents, double weight);
// Three-agent unbalanced example with u = (0.5, 1.5, 1.0); C = R^T.
WeightMatrices ThreeNodeExample();
// Representative five-agent unbalanced directed topology. The weights are
// chosen for this project and are not taken from any published figure.
WeightMatrices FiveNodeExample();

}  // namespace ldpq::topology

#endif  // LDPQ_TOPOLOGY_H_
