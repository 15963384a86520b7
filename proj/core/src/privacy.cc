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

#include "ldpq/privacy.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/zeta.hpp>

#include "ldpq/error.h"
#include "ldpq/metrics.h"

namespace ldpq::privacy {
namespace {

using metrics::FormatDouble;

void CheckParams(const AnalyticParams& p) {
  const double ac = std::abs(p.c_ii);
  const double ar = std::abs(p.r_ii);
  if (!(ac > 0.0 && ac < 1.0) || !(ar > 0.0 && ar < 1.0)) {
    throw Error(ErrorKind::kArgument, "|C_ii| and |R_ii| must lie in (0,1)");
  }
  if (!(p.d_l > 0.0)) throw Error(ErrorKind::kArgument, "d_l must be positive");
  if (!(p.u_i > 0.0)) throw Error(ErrorKind::kArgument, "u_i must be positive");
  if (!(p.lambda0 > 0.0)) throw Error(ErrorKind::kArgument, "lambda0 must be positive");
  if (!(p.c_z >= 0.0) || !(p.p_z > 0.0 && p.p_z < 1.0)) {
    throw Error(ErrorKind::kArgument, "need C_z >= 0 and P_z in (0,1)");
  }
}

double Lambda(const AnalyticParams& p, int t) {
  return p.lambda0 / std::pow(static_cast<double>(t) + 1.0, p.nu);
}

// Tracks the largest running cumulative delta across twins after each round.
class MaxSeries final : public engine::RoundObserver {
 public:
  MaxSeries(const std::vector<std::unique_ptr<TwinTracker>>& twins,
            std::vector<double>& out)
      : twins_(twins), out_(out) {}
  void OnRound(const engine::RoundRecord&) override { out_.push_back(Current()); }
  double Current() const {
    double best = 0.0;
    for (const auto& tw : twins_) best = std::max(best, tw->cumulative_delta());
    return best;
  }

 private:
  const std::vector<std::unique_ptr<TwinTracker>>& twins_;
  std::vector<double>& out_;
};

}  // namespace

AdjacentPerturbation FromDatasets(int agent,
                                  const std::vector<problems::Batch>& d,
                                  const std::vector<problems::Batch>& d_prime) {
  if (d.size() != d_prime.size()) {
    throw Error(ErrorKind::kArgument, "adjacent datasets must cover the same rounds");
  }
  AdjacentPerturbation pert;
  pert.agent = agent;
  int differing = 0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (d[k] == d_prime[k]) continue;
    if (++differing > 1) {
      throw Error(ErrorKind::kArgument,
                  "datasets differ in more than one round; not adjacent");
    }
    pert.round = static_cast<int>(k);
  }
  if (!d.empty()) {
    pert.original = d[pert.round];
    pert.replacement = d_prime[pert.round];
  }
  return pert;
}

AdjacentPerturbation RandomReplacement(const problems::DataSource& source,
                                       int agent, int round,
                                       std::uint64_t salt) {
  AdjacentPerturbation pert;
  pert.agent = agent;
  pert.round = round;
  pert.original = source.Draw(round, agent);
  pert.replacement = source.Perturb(pert.original, round, agent, salt);
  return pert;
}

TwinTracker::TwinTracker(const topology::WeightMatrices& w,
                         AdjacentPerturbation pert, problems::LossKind kind,
                         std::optional<int> window, quant::QuantSchedule schedule)
    : w_(w),
      pert_(std::move(pert)),
      schedule_(schedule),
      shadow_data_(kind, window) {
  if (pert_.agent < 0 || pert_.agent >= w_.agents()) {
    throw Error(ErrorKind::kArgument, "perturbed agent out of range");
  }
  if (pert_.round < 0) throw Error(ErrorKind::kArgument, "perturbed round must be >= 0");
  if (pert_.original.size() != pert_.replacement.size()) {
    throw Error(ErrorKind::kArgument, "replacement batch must have the original's size");
  }
}

void TwinTracker::OnRound(const engine::RoundRecord& r) {
  const int i = pert_.agent;
  if (!started_) {
    if (r.t != 0) throw Error(ErrorKind::kState, "twin must start at round 0");
    theta_ = r.theta[i];
    psi_ = r.psi[i];
    grad_ = Eigen::VectorXd::Zero(theta_.size());
    series_.theta.push_back(0.0);
    series_.psi.push_back(0.0);
    series_.total.push_back(0.0);
    steps_.push_back(schedule_.StepAt(0));
    started_ = true;
  }
  if (r.t == pert_.round) {
    if (!(r.batches[i] == pert_.original)) {
      throw Error(ErrorKind::kArgument,
                  "perturbation original does not match agent " +
                      std::to_string(i) + "'s data at round " + std::to_string(r.t));
    }
    shadow_data_.Append(pert_.replacement);
  } else {
    shadow_data_.Append(r.batches[i]);
  }
  shadow_data_.OnlineGradientInto(theta_, r.t, grad_);
  engine::ApplyUpdate(w_, i, r.t, theta_, psi_, r.z(i, i), r.q_theta, r.q_psi,
                      grad_, r.lambda, theta_next_, psi_next_);
  std::swap(theta_, theta_next_);
  std::swap(psi_, psi_next_);

  const double dt = (r.theta_next[i] - theta_).lpNorm<1>();
  const double dp = (r.psi_next[i] - psi_).lpNorm<1>();
  series_.theta.push_back(dt);
  series_.psi.push_back(dp);
  series_.total.push_back(dt + dp);
  const double step = schedule_.StepAt(r.t + 1);
  steps_.push_back(step);
  cumulative_ += (dt + dp) / step;
}

PrivacyLedger AccumulateDelta(const std::vector<double>& delta,
                              const std::vector<double>& steps) {
  if (delta.size() != steps.size()) {
    throw Error(ErrorKind::kArgument, "sensitivity and step series must align");
  }
  PrivacyLedger ledger;
  double sum = 0.0;
  for (std::size_t t = 0; t < delta.size(); ++t) {
    const double dt = delta[t] / steps[t];
    if (dt >= 1.0) ledger.round_violation = true;
    sum += dt;
    ledger.delta_t.push_back(dt);
    ledger.cumulative.push_back(sum);
  }
  ledger.budget_violation = sum > 1.0;
  return ledger;
}

AnalyticBound AnalyticRho(const AnalyticParams& p, double varsigma, int horizon) {
  CheckParams(p);
  if (horizon < 0) throw Error(ErrorKind::kArgument, "horizon must be >= 0");
  const double a_c = 1.0 - std::abs(p.c_ii);
  const double a_r = 1.0 - std::abs(p.r_ii);
  const auto n = static_cast<std::size_t>(horizon) + 1;

  std::vector<double> lambda(n), pow_c(n), pow_r(n), envelope(n);
  for (std::size_t t = 0; t < n; ++t) {
    lambda[t] = Lambda(p, static_cast<int>(t));
    pow_c[t] = std::pow(a_c, static_cast<double>(t));
    pow_r[t] = std::pow(a_r, static_cast<double>(t));
    envelope[t] = p.c_z * std::pow(p.p_z, static_cast<double>(t)) + 1.0 / p.u_i;
  }

  AnalyticBound out;
  out.rho_psi.assign(n, 0.0);
  out.rho_theta.assign(n, 0.0);
  for (std::size_t t = 1; t < n; ++t) {
    double s = 0.0;
    for (std::size_t q = 0; q < t; ++q) s += pow_c[q] * lambda[t - 1 - q];
    out.rho_psi[t] = 2.0 * p.d_l * s;
  }
  for (std::size_t t = 1; t < n; ++t) {
    double s = 0.0;
    for (std::size_t q = 0; q < t; ++q) {
      s += pow_r[t - q - 1] * envelope[q] * (out.rho_psi[q + 1] + out.rho_psi[q]);
    }
    out.rho_theta[t] = s;
  }
  for (int t = 0; t < horizon; ++t) {
    out.required_d0 += (out.rho_psi[t] + out.rho_theta[t]) *
                       std::pow(static_cast<double>(t) + 1.0, varsigma);
  }
  return out;
}

double Certificate::Bound(int t) const {
  return c3 * (c_z + c0) / std::pow(static_cast<double>(t) + 1.0, 1.0 + nu);
}

Certificate AsymptoticCertificate(const CertificateParams& cp) {
  const AnalyticParams& p = cp.base;
  CheckParams(p);
  Certificate cert;
  cert.c_z = p.c_z;
  cert.nu = p.nu;
  const double ar = std::abs(p.r_ii);
  const double ac = std::abs(p.c_ii);
  const double u = std::abs(p.u_i);
  const double root_n = std::sqrt(static_cast<double>(cp.dimension));

  cert.c1 = 0.5 * std::min(ar / 2.0, ac / 2.0);
  cert.c0 = (4.0 - 2.0 * cert.c1) / (u * (ac - 2.0 * cert.c1));

  // Both right-hand sides are nonincreasing from t_mono on, so once they hold
  // there they hold for every later t.
  const double t_mono = std::ceil(std::max(1.0 / p.nu, -1.0 / std::log(p.p_z))) + 1.0;
  int last_fail = -1;
  bool settled = false;
  for (int t = 0; t <= cp.scan_cap; ++t) {
    const double td = static_cast<double>(t);
    const double lt = Lambda(p, t);
    const double pz = std::pow(p.p_z, td);
    const double rhs1 = root_n * cp.lipschitz * p.c_z * td * pz * lt / (td + 1.0) +
                        cert.c0 * root_n * cp.lipschitz * td * lt / (td + 1.0);
    const double rhs2 = (2.0 - ac) * p.c_z * pz;
    const bool ok = ar / 2.0 >= rhs1 && cert.c0 * ac / 2.0 >= rhs2;
    if (!ok) {
      last_fail = t;
    } else if (td >= t_mono) {
      settled = true;
      break;
    }
  }
  if (!settled) {
    cert.reason = "no T0 found within " + std::to_string(cp.scan_cap) + " rounds";
    return cert;
  }
  cert.t0 = std::max(last_fail + 1, 1);

  // rho at T0 by the unrolled recursions.
  double rpsi = 0.0;
  double rtheta = 0.0;
  for (int t = 0; t < cert.t0; ++t) {
    const double next_psi = (1.0 - ac) * rpsi + 2.0 * p.d_l * Lambda(p, t);
    const double env = p.c_z * std::pow(p.p_z, static_cast<double>(t)) + 1.0 / u;
    rtheta = (1.0 - ar) * rtheta + env * (next_psi + rpsi);
    rpsi = next_psi;
  }
  cert.rho_t0 = rtheta + (cert.c0 - 1.0 / u) * rpsi;

  const double k = 2.0 * p.d_l * p.lambda0 * (p.c_z + cert.c0);
  const double expo = 1.0 + p.nu;
  const double t0 = static_cast<double>(cert.t0);
  const double a =
      (2.0 / cert.c1 + cert.rho_t0 * std::pow(1.0 - cert.c1, 1.0 - t0) / k) *
      std::pow(4.0 * expo / (std::numbers::e * std::log(2.0 / (2.0 - cert.c1))), expo);
  const double b = cert.rho_t0 * std::pow(t0 + 1.0, expo) / k;
  cert.c2 = std::max(a, b);
  cert.c3 = 2.0 * cert.c2 * p.d_l * p.lambda0 * ((cert.c0 + 1.0) * u - 1.0) /
            (cert.c0 * u - 1.0);
  if (!std::isfinite(cert.c3)) {
    cert.reason = "certificate constants overflow";
    return cert;
  }
  const double s = 1.0 + p.nu - cp.varsigma;
  if (!(s > 1.0)) {
    cert.reason = "1 + nu - varsigma must exceed 1";
    return cert;
  }
  cert.required_d0 = cert.c3 * (p.c_z + cert.c0) * boost::math::zeta(s);
  cert.available = true;
  return cert;
}

BudgetResult BudgetCheck(double d0, const AnalyticBound& bound) {
  if (!(d0 > 0.0)) throw Error(ErrorKind::kArgument, "d0 must be positive");
  return {d0 >= bound.required_d0, bound.required_d0 / d0};
}

std::vector<PerturbationSpec> DefaultPerturbations(int agents, int round) {
  std::vector<PerturbationSpec> out;
  for (int i = 0; i < agents; ++i) out.push_back({i, round, 0});
  return out;
}

bool AuditResult::AllBoundsHold(int up_to) const {
  for (const auto& tw : twins) {
    if (tw.bound_ok.empty()) return false;
    const int last = std::min<int>(up_to, static_cast<int>(tw.bound_ok.size()) - 1);
    for (int t = 0; t <= last; ++t) {
      if (!tw.bound_ok[t]) return false;
    }
  }
  return true;
}

AuditResult RunAudit(const engine::RunConfig& config,
                     const problems::Problem& problem,
                     const AuditOptions& options,
                     const engine::RunHooks& hooks) {
  engine::RequireValid(config);
  const int m = config.weights.agents();
  AuditResult audit;
  audit.dimension = problem.dimension;

  audit.user_constants = options.c_z.has_value() || options.p_z.has_value();
  if (options.c_z && options.p_z) {
    audit.c_z = *options.c_z;
    audit.p_z = *options.p_z;
  } else {
    const auto fit = topology::EstimateGeometricConstants(config.weights,
                                                          options.fit_horizon);
    audit.c_z = options.c_z.value_or(fit.amplitude);
    audit.p_z = options.p_z.value_or(fit.rate);
  }
  const Eigen::VectorXd u = topology::LeftEigenvector(config.weights.R);

  std::vector<std::unique_ptr<TwinTracker>> trackers;
  for (const auto& spec : options.perturbations) {
    if (spec.agent < 0 || spec.agent >= m) {
      throw Error(ErrorKind::kConfiguration, "perturbed agent out of range");
    }
    if (spec.round < 0 || spec.round >= std::max(config.horizon, 1)) {
      throw Error(ErrorKind::kConfiguration, "perturbation round must be < T");
    }
    trackers.push_back(std::make_unique<TwinTracker>(
        config.weights,
        RandomReplacement(*problem.source, spec.agent, spec.round, spec.salt),
        problem.kind, config.problem.window, config.quant[spec.agent]));
  }

  audit.max_delta_series.push_back(0.0);
  MaxSeries series(trackers, audit.max_delta_series);
  engine::RunHooks run_hooks = hooks;
  for (auto& tw : trackers) run_hooks.observers.push_back(tw.get());
  run_hooks.observers.push_back(&series);
  run_hooks.max_delta = [&series] { return series.Current(); };

  audit.run = engine::Run(config, problem, run_hooks);

  const bool analytic = problem.grad_l1_bound.has_value() && *problem.grad_l1_bound > 0.0;
  if (!analytic) {
    audit.notes.push_back("no gradient bound d_l; analytic bounds unavailable");
  }
  const std::optional<double> lipschitz =
      options.lipschitz ? options.lipschitz : problem.lipschitz;

  audit.agent_delta.assign(m, 0.0);
  for (std::size_t k = 0; k < trackers.size(); ++k) {
    const TwinTracker& tr = *trackers[k];
    TwinAudit tw;
    tw.spec = options.perturbations[k];
    tw.sensitivity = tr.series();
    tw.steps = tr.steps();
    tw.ledger = AccumulateDelta(tw.sensitivity.total, tw.steps);
    const int i = tw.spec.agent;
    if (analytic) {
      AnalyticParams params;
      params.lambda0 = config.step.lambda0;
      params.nu = config.step.nu;
      params.d_l = *problem.grad_l1_bound;
      params.c_ii = config.weights.C(i, i);
      params.r_ii = config.weights.R(i, i);
      params.u_i = u(i);
      params.c_z = audit.c_z;
      params.p_z = audit.p_z;
      tw.bound = AnalyticRho(params, config.quant[i].varsigma, config.horizon);
      tw.bound_ok.resize(tw.sensitivity.total.size());
      for (std::size_t t = 0; t < tw.bound_ok.size(); ++t) {
        tw.bound_ok[t] = tw.sensitivity.total[t] <=
                         tw.bound->rho_psi[t] + tw.bound->rho_theta[t];
      }
      tw.budget = BudgetCheck(config.quant[i].d0, *tw.bound);
      if (lipschitz) {
        CertificateParams cp;
        cp.base = params;
        cp.lipschitz = *lipschitz;
        cp.dimension = problem.dimension;
        cp.varsigma = config.quant[i].varsigma;
        cp.scan_cap = options.scan_cap;
        tw.certificate = AsymptoticCertificate(cp);
      }
    }
    audit.agent_delta[i] = std::max(audit.agent_delta[i], tw.ledger.total());
    audit.twins.push_back(std::move(tw));
  }
  for (double d : audit.agent_delta) audit.max_delta = std::max(audit.max_delta, d);
  return audit;
}

void WriteAuditReport(std::ostream& out, const AuditResult& a,
                      const engine::RunConfig& config) {
  out << "# ldpq privacy audit\n"
      << "# twin reading: each audited agent has a shadow copy run on the "
         "adjacent dataset; the shadow receives the primary run's quantized "
         "neighbor messages verbatim and quantizes nothing itself, so Delta is "
         "measured on pre-quantization states\n"
      << "# constants: " << (a.user_constants ? "user-constant" : "empirical-constant")
      << " C_z=" << FormatDouble(a.c_z) << " P_z=" << FormatDouble(a.p_z) << '\n'
      << "# certificate assumption: sqrt(n) taken as sqrt(d) with d="
      << a.dimension << '\n';
  for (const auto& note : a.notes) out << "# note: " << note << '\n';
  out << "agent,round,t,delta_theta,delta_psi,delta,d_t,delta_t,cumulative_delta,"
         "rho_psi,rho_theta,bound_ok\n";
  for (const auto& tw : a.twins) {
    const auto& s = tw.sensitivity;
    for (std::size_t t = 0; t < s.total.size(); ++t) {
      out << tw.spec.agent << ',' << tw.spec.round << ',' << t << ','
          << FormatDouble(s.theta[t]) << ',' << FormatDouble(s.psi[t]) << ','
          << FormatDouble(s.total[t]) << ',' << FormatDouble(tw.steps[t]) << ','
          << FormatDouble(tw.ledger.delta_t[t]) << ','
          << FormatDouble(tw.ledger.cumulative[t]) << ',';
      if (tw.bound) {
        out << FormatDouble(tw.bound->rho_psi[t]) << ','
            << FormatDouble(tw.bound->rho_theta[t]) << ','
            << (tw.bound_ok[t] ? 1 : 0);
      } else {
        out << "nan,nan,nan";
      }
      out << '\n';
    }
  }
  out << "# summary\n"
      << "# agent,round,delta_i,ldp_pair,valid,required_d0,d0,budget_satisfied,"
         "delta_bound,T0,C0,C1,C2,C3,asymptotic_required_d0\n";
  for (const auto& tw : a.twins) {
    const int i = tw.spec.agent;
    out << "# " << i << ',' << tw.spec.round << ',' << FormatDouble(tw.ledger.total())
        << ",(0;" << FormatDouble(tw.ledger.total()) << ")," << (tw.ledger.valid() ? 1 : 0)
        << ',';
    if (tw.bound) {
      out << FormatDouble(tw.bound->required_d0) << ',' << FormatDouble(config.quant[i].d0)
          << ',' << (tw.budget->satisfied ? 1 : 0) << ','
          << FormatDouble(tw.budget->delta_bound) << ',';
    } else {
      out << "nan," << FormatDouble(config.quant[i].d0) << ",nan,nan,";
    }
    if (tw.certificate && tw.certificate->available) {
      const auto& c = *tw.certificate;
      out << c.t0 << ',' << FormatDouble(c.c0) << ',' << FormatDouble(c.c1) << ','
          << FormatDouble(c.c2) << ',' << FormatDouble(c.c3) << ','
          << FormatDouble(c.required_d0);
    } else {
      out << "unavailable,nan,nan,nan,nan,nan";
    }
    out << '\n';
  }
  out << "# max_delta," << FormatDouble(a.max_delta) << '\n';
}

}  // namespace ldpq::privacy
