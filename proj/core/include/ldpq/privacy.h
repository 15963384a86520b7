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

#ifndef LDPQ_PRIVACY_H_
#define LDPQ_PRIVACY_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldpq/engine.h"
#include "ldpq/problems.h"
#include "ldpq/quantizer.h"
#include "ldpq/topology.h"

namespace ldpq::privacy {

// Agent `agent`'s adjacent dataset: round `round` holds `replacement`
// instead of `original`; every other round is unchanged.
struct AdjacentPerturbation {
  int agent = 0;
  int round = 0;
  problems::Batch original;
  problems::Batch replacement;
};

// Builds the perturbation separating two per-round datasets of one agent.
// Throws Error(kArgument) when their lengths differ or more than one round
// differs. Identical datasets give round 0 with replacement == original.
AdjacentPerturbation FromDatasets(int agent,
                                  const std::vector<problems::Batch>& d,
                                  const std::vector<problems::Batch>& d_prime);

// One data point of the agent's round-`round` batch replaced by another.
AdjacentPerturbation RandomReplacement(const problems::DataSource& source,
                                       int agent, int round,
                                       std::uint64_t salt);

// Sensitivities indexed by t = 0..T.
struct SensitivitySeries {
  std::vector<double> theta;
  std::vector<double> psi;
  std::vector<double> total;
};

// Shadow copy of one agent run on the adjacent dataset. It receives the
// primary run's quantized neighbor messages verbatim and quantizes nothing of
// its own, so Delta measures the pre-quantization internal state.
class TwinTracker final : public engine::RoundObserver {
 public:
  TwinTracker(const topology::WeightMatrices& w, AdjacentPerturbation pert,
              problems::LossKind kind, std::optional<int> window,
              quant::QuantSchedule schedule);

  void OnRound(const engine::RoundRecord& record) override;

  const AdjacentPerturbation& perturbation() const { return pert_; }
  const SensitivitySeries& series() const { return series_; }
  // Step sizes d_t aligned with series().
  const std::vector<double>& steps() const { return steps_; }
  // sum of Delta_s / d_s over the rounds seen so far.
  double cumulative_delta() const { return cumulative_; }

 private:
  topology::WeightMatrices w_;
  AdjacentPerturbation pert_;
  quant::QuantSchedule schedule_;
  problems::OnlineDataset shadow_data_;
  Eigen::VectorXd theta_, psi_, theta_next_, psi_next_, grad_;
  SensitivitySeries series_;
  std::vector<double> steps_;
  double cumulative_ = 0.0;
  bool started_ = false;
};

struct PrivacyLedger {
  std::vector<double> delta_t;     // Delta_t / d_t
  std::vector<double> cumulative;  // running sum of delta_t
  bool round_violation = false;    // some delta_t >= 1
  bool budget_violation = false;   // total > 1

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
  bool valid() const { return !round_violation && !budget_violation; }
};

// delta_t = Delta_t / d_t, summed over every t in the series.
PrivacyLedger AccumulateDelta(const std::vector<double>& delta,
                              const std::vector<double>& steps);

struct AnalyticParams {
  double lambda0 = 0.5;
  double nu = 0.71;
  double d_l = 1.0;
  double c_ii = -0.5;
  double r_ii = -0.5;
  double u_i = 1.0;
  double c_z = 1.0;
  double p_z = 0.5;
};

struct AnalyticBound {
  std::vector<double> rho_psi;    // t = 0..T
  std::vector<double> rho_theta;  // t = 0..T
  // sum_{t<T} (rho_psi + rho_theta)(t) (t+1)^varsigma
  double required_d0 = 0.0;
};

// Direct summation of the sensitivity bounds. Throws Error(kArgument) when
// |C_ii| or |R_ii| is not in (0,1) or d_l is not positive.
AnalyticBound AnalyticRho(const AnalyticParams& params, double varsigma,
                          int horizon);

struct CertificateParams {
  AnalyticParams base;
  double lipschitz = 0.0;
  int dimension = 1;  // the sqrt(n) factor is taken as sqrt(dimension)
  double varsigma = 0.6;
  int scan_cap = 10'000'000;
};

struct Certificate {
  bool available = false;
  std::string reason;
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  int t0 = 0;
  double rho_t0 = 0.0;
  double required_d0 = 0.0;  // infinite horizon
  double c_z = 0.0;
  double nu = 0.0;

  // C3 (C_z + C0) / (t+1)^(1+nu).
  double Bound(int t) const;
};

Certificate AsymptoticCertificate(const CertificateParams& params);

struct BudgetResult {
  bool satisfied = true;
  double delta_bound = 0.0;  // required / d0
};

BudgetResult BudgetCheck(double d0, const AnalyticBound& bound);

struct PerturbationSpec {
  int agent = 0;
  int round = 0;
  std::uint64_t salt = 0;
};

// One random replacement per agent at `round`.
std::vector<PerturbationSpec> DefaultPerturbations(int agents, int round);

struct AuditOptions {
  std::vector<PerturbationSpec> perturbations;
  std::optional<double> c_z;
  std::optional<double> p_z;
  std::optional<double> lipschitz;
  int fit_horizon = 400;
  int scan_cap = 10'000'000;
};

struct TwinAudit {
  PerturbationSpec spec;
  SensitivitySeries sensitivity;
  std::vector<double> steps;
  PrivacyLedger ledger;
  std::optional<AnalyticBound> bound;
  std::vector<char> bound_ok;  // per t; empty without a bound
  std::optional<BudgetResult> budget;
  std::optional<Certificate> certificate;
};

struct AuditResult {
  engine::RunResult run;
  std::vector<TwinAudit> twins;
  std::vector<double> agent_delta;       // delta^i, max over the agent's twins
  std::vector<double> max_delta_series;  // max_i cumulative delta^i per round
  double max_delta = 0.0;
  bool user_constants = false;
  double c_z = 0.0;
  double p_z = 0.0;
  int dimension = 0;
  std::vector<std::string> notes;

  bool AllBoundsHold(int up_to) const;
};

// Primary run plus one twin per perturbation, with ledgers and analytic
// bounds. The trace's max_delta column carries max_i cumulative delta^i.
AuditResult RunAudit(const engine::RunConfig& config,
                     const problems::Problem& problem,
                     const AuditOptions& options,
                     const engine::RunHooks& hooks = {});

void WriteAuditReport(std::ostream& out, const AuditResult& audit,
                      const engine::RunConfig& config);

}  // namespace ldpq::privacy

#endif  // LDPQ_PRIVACY_H_
