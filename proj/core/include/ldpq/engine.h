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

#ifndef LDPQ_ENGINE_H_
#define LDPQ_ENGINE_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ldpq/metrics.h"
#include "ldpq/problems.h"
#include "ldpq/quantizer.h"
#include "ldpq/random.h"
#include "ldpq/topology.h"

namespace ldpq::engine {

// lambda_t = lambda0 / (t+1)^nu.
struct StepSchedule {
  double lambda0 = 0.5;
  double nu = 0.71;

  double At(int t) const;
};

struct AgentState {
  Eigen::VectorXd theta;
  Eigen::VectorXd psi;
  Eigen::VectorXd z;
};

struct RunConfig {
  topology::WeightMatrices weights;
  StepSchedule step;
  std::vector<quant::QuantSchedule> quant;  // one per agent
  int horizon = 100;
  std::uint64_t seed = 1;
  problems::ProblemSpec problem;
  bool quantize = true;
  double init_scale = 1.0;
  bool psi0_zero = false;
  int trace_interval = 1;
  int flush_interval = 10;
  bool keep_messages = false;
};

// Weight-matrix conditions, one message per failed topology condition.
std::vector<std::string> CheckTopology(const RunConfig& config);
// Step, quantizer and run-parameter constraints.
std::vector<std::string> CheckSchedules(const RunConfig& config);
// Both of the above; empty when the config is valid.
std::vector<std::string> CheckConfig(const RunConfig& config);
// Throws Error(kConfiguration) listing CheckConfig's messages.
void RequireValid(const RunConfig& config);

// Agent i's round update from round-t values:
//   psi' = (1+C_ii) psi + sum_{j!=i} C_ij q_psi[j] + lambda g
//   theta' = (1+R_ii) theta + sum_{j!=i} R_ij q_theta[j] - (psi' - psi)/(m z_ii)
// Shared by the engine and by shadow trajectories. Throws Error(kStructural)
// if z_ii is not positive.
void ApplyUpdate(const topology::WeightMatrices& w, int i, int t,
                 const Eigen::VectorXd& theta, const Eigen::VectorXd& psi,
                 double z_ii, const std::vector<Eigen::VectorXd>& q_theta,
                 const std::vector<Eigen::VectorXd>& q_psi,
                 const Eigen::VectorXd& grad, double lambda,
                 Eigen::VectorXd& theta_next, Eigen::VectorXd& psi_next);

// Everything one round produced. References are valid only inside
// RoundObserver::OnRound.
struct RoundRecord {
  int t;
  double lambda;
  const std::vector<Eigen::VectorXd>& q_theta;
  const std::vector<Eigen::VectorXd>& q_psi;
  const std::vector<double>& steps;  // d_t^i
  const Eigen::MatrixXd& z;          // round-t z, row i is z^i
  const std::vector<problems::Batch>& batches;
  const std::vector<Eigen::VectorXd>& gradients;
  const std::vector<Eigen::VectorXd>& theta;  // round t
  const std::vector<Eigen::VectorXd>& psi;
  const std::vector<Eigen::VectorXd>& theta_next;
  const std::vector<Eigen::VectorXd>& psi_next;
};

class RoundObserver {
 public:
  virtual ~RoundObserver() = default;
  virtual void OnRound(const RoundRecord& record) = 0;
};

class Simulation {
 public:
  // Validates the config and draws the initial states.
  Simulation(const RunConfig& config, const problems::Problem& problem);

  int agents() const { return m_; }
  int dimension() const { return dim_; }
  int time() const { return t_; }

  const std::vector<Eigen::VectorXd>& thetas() const { return theta_; }
  const std::vector<Eigen::VectorXd>& psis() const { return psi_; }
  const Eigen::MatrixXd& z() const { return z_; }
  AgentState State(int i) const;
  const std::vector<Eigen::VectorXd>& last_gradients() const { return grad_; }
  const problems::OnlineDataset& dataset(int i) const { return datasets_.at(i); }
  const Eigen::VectorXd& u() const { return u_; }
  const Eigen::VectorXd& v() const { return v_; }
  const RunConfig& config() const { return config_; }

  void AddObserver(RoundObserver* observer) { observers_.push_back(observer); }

  // One bulk-synchronous round in agent order 0..m-1.
  void Step();
  // Same round, visiting agents in `order` (a permutation of 0..m-1). The
  // result does not depend on the order.
  void Step(std::span<const int> order);

 private:
  RunConfig config_;
  std::shared_ptr<const problems::DataSource> source_;
  int m_;
  int dim_;
  int t_ = 0;
  Eigen::VectorXd u_;
  Eigen::VectorXd v_;

  std::vector<Eigen::VectorXd> theta_, psi_;
  Eigen::MatrixXd z_;
  std::vector<problems::OnlineDataset> datasets_;
  std::vector<RandomStream> quant_streams_;

  std::vector<problems::Batch> batches_;
  std::vector<Eigen::VectorXd> grad_, q_theta_, q_psi_, theta_next_, psi_next_;
  std::vector<double> steps_;
  std::vector<RoundObserver*> observers_;
};

struct MessageRecord {
  int t = 0;
  int agent = 0;
  Eigen::VectorXd q_theta;
  Eigen::VectorXd q_psi;
  double step = 0.0;
};

void WriteMessageHeader(std::ostream& out, int dimension);
void WriteMessage(std::ostream& out, const MessageRecord& record);
void WriteStates(std::ostream& out, const std::vector<AgentState>& states);

struct RunHooks {
  std::vector<RoundObserver*> observers;
  // Value for the max_delta column after round t; 0 when unset.
  std::function<double()> max_delta;
  std::ostream* trace = nullptr;
  std::ostream* messages = nullptr;
};

struct RunResult {
  metrics::MetricsTrace trace;
  std::vector<AgentState> final_states;
  std::vector<MessageRecord> messages;  // when keep_messages
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

// Trace rows at t=0, every trace_interval and at T. Streams are flushed every
// flush_interval rounds; a failed write throws Error(kIo) after the rows
// already flushed.
RunResult Run(const RunConfig& config, const problems::Problem& problem,
              const RunHooks& hooks = {});

// Diagnostics of the current iterates.
metrics::TraceRow Diagnose(const Simulation& sim,
                           const problems::Objective& objective,
                           double max_delta);

}  // namespace ldpq::engine

#endif  // LDPQ_ENGINE_H_
