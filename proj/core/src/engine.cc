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

#include "ldpq/engine.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ldpq/error.h"

namespace ldpq::engine {
namespace {

bool InOpenUnitHalf(double x) { return x > 0.5 && x < 1.0; }

class MessageSink final : public RoundObserver {
 public:
  MessageSink(std::ostream* out, std::vector<MessageRecord>* keep)
      : out_(out), keep_(keep) {}

  void OnRound(const RoundRecord& r) override {
    for (std::size_t i = 0; i < r.q_theta.size(); ++i) {
      MessageRecord rec{r.t, static_cast<int>(i), r.q_theta[i], r.q_psi[i],
                        r.steps[i]};
      if (out_) WriteMessage(*out_, rec);
      if (keep_) keep_->push_back(std::move(rec));
    }
  }

 private:
  std::ostream* out_;
  std::vector<MessageRecord>* keep_;
};

void CheckStream(std::ostream* out, const char* what, int t) {
  if (out && !out->good()) {
    throw Error(ErrorKind::kIo, std::string("write to ") + what +
                                    " failed after round " + std::to_string(t));
  }
}

}  // namespace

double StepSchedule::At(int t) const {
  return lambda0 / std::pow(static_cast<double>(t) + 1.0, nu);
}

std::vector<std::string> CheckTopology(const RunConfig& c) {
  std::vector<std::string> out;
  const auto& w = c.weights;
  if (w.R.rows() != w.R.cols() || w.C.rows() != w.C.cols() ||
      w.R.rows() != w.C.rows() || w.agents() < 2) {
    out.push_back("weight matrices must be square, of equal size, m >= 2");
    return out;
  }
  try {
    const auto report = topology::Validate(w);
    for (const auto& f : report.failures) out.push_back(f.id + ": " + f.detail);
  } catch (const Error& e) {
    out.push_back(e.what());
  }
  return out;
}

std::vector<std::string> CheckSchedules(const RunConfig& c) {
  std::vector<std::string> out;
  const int m = c.weights.agents();
  if (!InOpenUnitHalf(c.step.nu)) out.push_back("nu outside (1/2,1)");
  if (!(c.step.lambda0 > 0.0)) out.push_back("lambda0 must be positive");
  if (static_cast<int>(c.quant.size()) != m) {
    out.push_back("expected " + std::to_string(m) + " quantizer schedules, got " +
                  std::to_string(c.quant.size()));
  }
  double max_varsigma = -1.0;
  for (std::size_t i = 0; i < c.quant.size(); ++i) {
    const auto& q = c.quant[i];
    if (!(q.d0 > 0.0) || !std::isfinite(q.d0)) {
      out.push_back("d0 of agent " + std::to_string(i) + " must be positive");
    }
    if (!InOpenUnitHalf(q.varsigma)) {
      out.push_back("varsigma of agent " + std::to_string(i) + " outside (1/2,1)");
    }
    max_varsigma = std::max(max_varsigma, q.varsigma);
  }
  if (!c.quant.empty() && !(max_varsigma < c.step.nu)) {
    out.push_back("max varsigma < nu violated");
  }
  if (c.horizon < 0) out.push_back("horizon must be >= 0");
  if (c.trace_interval < 1) out.push_back("trace interval must be >= 1");
  if (c.flush_interval < 1) out.push_back("flush interval must be >= 1");
  if (!(c.init_scale >= 0.0)) out.push_back("init scale must be >= 0");
  if (c.problem.dimension < 1) out.push_back("dimension must be >= 1");
  if (c.problem.batch < 1) out.push_back("batch must be >= 1");
  return out;
}

std::vector<std::string> CheckConfig(const RunConfig& c) {
  std::vector<std::string> out = CheckTopology(c);
  for (auto& s : CheckSchedules(c)) out.push_back(std::move(s));
  return out;
}

void RequireValid(const RunConfig& config) {
  const auto problems = CheckConfig(config);
  if (problems.empty()) return;
  std::string msg = "invalid run configuration:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw Error(ErrorKind::kConfiguration, msg);
}

void ApplyUpdate(const topology::WeightMatrices& w, int i, int t,
                 const Eigen::VectorXd& theta, const Eigen::VectorXd& psi,
                 double z_ii, const std::vector<Eigen::VectorXd>& q_theta,
                 const std::vector<Eigen::VectorXd>& q_psi,
                 const Eigen::VectorXd& grad, double lambda,
                 Eigen::VectorXd& theta_next, Eigen::VectorXd& psi_next) {
  if (!(z_ii > 0.0)) {
    throw Error(ErrorKind::kStructural,
                "agent " + std::to_string(i) + " has non-positive z_ii at t=" +
                    std::to_string(t));
  }
  const int m = w.agents();
  psi_next = (1.0 + w.C(i, i)) * psi;
  for (int j = 0; j < m; ++j) {
    if (j != i && w.C(i, j) != 0.0) psi_next.noalias() += w.C(i, j) * q_psi[j];
  }
  psi_next.noalias() += lambda * grad;

  theta_next = (1.0 + w.R(i, i)) * theta;
  for (int j = 0; j < m; ++j) {
    if (j != i && w.R(i, j) != 0.0) theta_next.noalias() += w.R(i, j) * q_theta[j];
  }
  theta_next.noalias() -= (psi_next - psi) / (static_cast<double>(m) * z_ii);
}

Simulation::Simulation(const RunConfig& config, const problems::Problem& problem)
    : config_(config), source_(problem.source) {
  RequireValid(config_);
  if (!source_) throw Error(ErrorKind::kConfiguration, "problem has no data source");
  m_ = config_.weights.agents();
  dim_ = problem.dimension;
  if (source_->dimension() != dim_) {
    throw Error(ErrorKind::kConfiguration, "data source dimension mismatch");
  }
  u_ = topology::LeftEigenvector(config_.weights.R);
  v_ = topology::RightEigenvector(config_.weights.C);

  theta_.resize(m_);
  psi_.resize(m_);
  for (int i = 0; i < m_; ++i) {
    RandomStream init = RandomStream::Derive(config_.seed, StreamPurpose::kInit,
                                             static_cast<std::uint64_t>(i));
    theta_[i].resize(dim_);
    psi_[i].resize(dim_);
    for (int k = 0; k < dim_; ++k) theta_[i](k) = config_.init_scale * init.Normal();
    for (int k = 0; k < dim_; ++k) {
      psi_[i](k) = config_.psi0_zero ? 0.0 : config_.init_scale * init.Normal();
    }
    datasets_.emplace_back(source_->kind(), config_.problem.window);
    quant_streams_.push_back(RandomStream::Derive(
        config_.seed, StreamPurpose::kQuantizer, static_cast<std::uint64_t>(i)));
  }
  z_ = Eigen::MatrixXd::Identity(m_, m_);

  batches_.resize(m_);
  grad_.assign(m_, Eigen::VectorXd::Zero(dim_));
  q_theta_.assign(m_, Eigen::VectorXd::Zero(dim_));
  q_psi_.assign(m_, Eigen::VectorXd::Zero(dim_));
  theta_next_.assign(m_, Eigen::VectorXd::Zero(dim_));
  psi_next_.assign(m_, Eigen::VectorXd::Zero(dim_));
  steps_.assign(m_, 0.0);
}

AgentState Simulation::State(int i) const {
  return {theta_.at(i), psi_.at(i), z_.row(i).transpose()};
}

void Simulation::Step() {
  std::vector<int> order(m_);
  std::iota(order.begin(), order.end(), 0);
  Step(order);
}

void Simulation::Step(std::span<const int> order) {
  std::vector<char> seen(m_, 0);
  if (static_cast<int>(order.size()) != m_) {
    throw Error(ErrorKind::kArgument, "agent order must list every agent once");
  }
  for (int i : order) {
    if (i < 0 || i >= m_ || seen[i]) {
      throw Error(ErrorKind::kArgument, "agent order must be a permutation");
    }
    seen[i] = 1;
  }
  const int t = t_;
  const double lambda = config_.step.At(t);

  for (int i : order) {
    batches_[i] = source_->Draw(t, i);
    datasets_[i].Append(batches_[i]);
    datasets_[i].OnlineGradientInto(theta_[i], t, grad_[i]);
  }
  for (int i : order) {
    steps_[i] = config_.quant[i].StepAt(t);
    if (config_.quantize) {
      q_theta_[i] = quant::QuantizeVector(theta_[i], steps_[i], quant_streams_[i]);
      q_psi_[i] = quant::QuantizeVector(psi_[i], steps_[i], quant_streams_[i]);
    } else {
      q_theta_[i] = theta_[i];
      q_psi_[i] = psi_[i];
    }
  }
  for (int i : order) {
    ApplyUpdate(config_.weights, i, t, theta_[i], psi_[i], z_(i, i), q_theta_,
                q_psi_, grad_[i], lambda, theta_next_[i], psi_next_[i]);
  }
  Eigen::MatrixXd z_next = topology::EigenEstimationStep(config_.weights.R, z_);

  const RoundRecord record{t,        lambda,   q_theta_, q_psi_,
                           steps_,   z_,       batches_, grad_,
                           theta_,   psi_,     theta_next_, psi_next_};
  for (RoundObserver* obs : observers_) obs->OnRound(record);

  std::swap(theta_, theta_next_);
  std::swap(psi_, psi_next_);
  z_ = std::move(z_next);
  ++t_;
}

void WriteMessageHeader(std::ostream& out, int dimension) {
  out << "t,agent,d_t";
  for (int k = 0; k < dimension; ++k) out << ",q_theta_" << k;
  for (int k = 0; k < dimension; ++k) out << ",q_psi_" << k;
  out << '\n';
}

void WriteMessage(std::ostream& out, const MessageRecord& r) {
  out << r.t << ',' << r.agent << ',' << metrics::FormatDouble(r.step);
  for (Eigen::Index k = 0; k < r.q_theta.size(); ++k) {
    out << ',' << metrics::FormatDouble(r.q_theta(k));
  }
  for (Eigen::Index k = 0; k < r.q_psi.size(); ++k) {
    out << ',' << metrics::FormatDouble(r.q_psi(k));
  }
  out << '\n';
}

void WriteStates(std::ostream& out, const std::vector<AgentState>& states) {
  if (states.empty()) return;
  const auto d = states.front().theta.size();
  const auto m = states.front().z.size();
  out << "agent";
  for (Eigen::Index k = 0; k < d; ++k) out << ",theta_" << k;
  for (Eigen::Index k = 0; k < d; ++k) out << ",psi_" << k;
  for (Eigen::Index k = 0; k < m; ++k) out << ",z_" << k;
  out << '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    out << i;
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << metrics::FormatDouble(states[i].theta(k));
    for (Eigen::Index k = 0; k < d; ++k) out << ',' << metrics::FormatDouble(states[i].psi(k));
    for (Eigen::Index k = 0; k < m; ++k) out << ',' << metrics::FormatDouble(states[i].z(k));
    out << '\n';
  }
}

metrics::TraceRow Diagnose(const Simulation& sim,
                           const problems::Objective& objective,
                           double max_delta) {
  metrics::TraceRow row;
  row.t = sim.time();
  const Eigen::VectorXd theta_bar = metrics::AverageTheta(sim.thetas(), sim.u());
  row.f_bar = objective.Value(theta_bar);
  row.gap = objective.Gap(theta_bar);
  row.grad_norm = objective.Gradient(theta_bar).norm();
  const auto cons =
      metrics::ConsensusErrors(sim.thetas(), sim.psis(), sim.u(), sim.v());
  row.cons_theta = cons.theta;
  row.cons_psi = cons.psi;
  row.max_delta = max_delta;
  return row;
}

RunResult Run(const RunConfig& config, const problems::Problem& problem,
              const RunHooks& hooks) {
  if (!problem.objective) throw Error(ErrorKind::kConfiguration, "problem has no objective");
  Simulation sim(config, problem);
  RunResult result;
  for (RoundObserver* obs : hooks.observers) sim.AddObserver(obs);
  MessageSink sink(hooks.messages, config.keep_messages ? &result.messages : nullptr);
  if (hooks.messages || config.keep_messages) sim.AddObserver(&sink);

  auto probe = [&] { return hooks.max_delta ? hooks.max_delta() : 0.0; };
  auto emit = [&] {
    const metrics::TraceRow row = Diagnose(sim, *problem.objective, probe());
    result.trace.Append(row);
    if (hooks.trace) metrics::WriteTraceRow(*hooks.trace, row);
  };

  if (hooks.trace) metrics::WriteTraceHeader(*hooks.trace);
  if (hooks.messages) WriteMessageHeader(*hooks.messages, sim.dimension());
  emit();
  for (int t = 0; t < config.horizon; ++t) {
    sim.Step();
    const int now = sim.time();
    if (now % config.trace_interval == 0 || now == config.horizon) emit();
    if (now % config.flush_interval == 0) {
      if (hooks.trace) hooks.trace->flush();
      if (hooks.messages) hooks.messages->flush();
      CheckStream(hooks.trace, "trace", now);
      CheckStream(hooks.messages, "message log", now);
    }
  }
  if (hooks.trace) hooks.trace->flush();
  if (hooks.messages) hooks.messages->flush();
  CheckStream(hooks.trace, "trace", sim.time());
  CheckStream(hooks.messages, "message log", sim.time());

  for (int i = 0; i < sim.agents(); ++i) result.final_states.push_back(sim.State(i));
  result.u = sim.u();
  result.v = sim.v();
  return result;
}

}  // namespace ldpq::engine
