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

#include "cli/commands.h"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "ldpq/config.h"
#include "ldpq/engine.h"
#include "ldpq/error.h"
#include "ldpq/metrics.h"
#include "ldpq/privacy.h"
#include "ldpq/problems.h"
#include "ldpq/topology.h"

namespace ldpq::cli {
namespace {

namespace fs = std::filesystem;
using metrics::FormatDouble;

// Failure while loading or validating: exit 1. Anything later: exit 2.
struct ValidationFailure {
  std::string message;
};

config::ExperimentConfig Load(const fs::path& path, const Overrides& o) {
  config::ExperimentConfig cfg;
  try {
    cfg = config::LoadConfig(path, /*strict=*/false);
  } catch (const Error& e) {
    throw ValidationFailure{e.what()};
  }
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.horizon) cfg.run.horizon = *o.horizon;
  if (o.out_dir) cfg.output.dir = *o.out_dir;
  const auto problems = engine::CheckConfig(cfg.run);
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw ValidationFailure{msg};
  }
  return cfg;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  return out;
}

problems::Problem BuildProblem(const config::ExperimentConfig& cfg, std::ostream& err) {
  problems::Problem problem =
      problems::MakeProblem(cfg.run.problem, cfg.run.weights.agents(), cfg.run.seed);
  for (const auto& w : problem.warnings) err << "warning: " << w << '\n';
  return problem;
}

void RecordError(const config::ExperimentConfig* cfg, const std::string& what) {
  if (!cfg) return;
  std::error_code ec;
  if (!fs::is_directory(cfg->output.dir, ec)) return;
  std::ofstream rec(cfg->output.dir / "error.txt", std::ios::trunc);
  rec << what << '\n';
}

template <typename Body>
int Guard(const fs::path& path, const Overrides& o, std::ostream& err, Body body) {
  std::unique_ptr<config::ExperimentConfig> cfg;
  try {
    cfg = std::make_unique<config::ExperimentConfig>(Load(path, o));
  } catch (const ValidationFailure& f) {
    err << f.message << '\n';
    return kExitValidation;
  }
  try {
    fs::create_directories(cfg->output.dir);
    return body(*cfg);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    RecordError(cfg.get(), e.what());
    return kExitRuntime;
  }
}

}  // namespace

int Validate(const fs::path& path, const Overrides& o, std::ostream& out,
             std::ostream& err) {
  config::ExperimentConfig cfg;
  try {
    cfg = config::LoadConfig(path, /*strict=*/false);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kExitValidation;
  }
  if (o.seed) cfg.run.seed = *o.seed;
  if (o.horizon) cfg.run.horizon = *o.horizon;

  bool ok = true;
  out << "graph: " << cfg.graph_label << " (" << cfg.run.weights.agents() << " agents)\n";
  try {
    const auto report = topology::Validate(cfg.run.weights);
    out << report.ToString();
    ok = report.passed();
    if (ok) {
      const auto u = topology::LeftEigenvector(cfg.run.weights.R);
      const auto v = topology::RightEigenvector(cfg.run.weights.C);
      out << "u:";
      for (Eigen::Index i = 0; i < u.size(); ++i) out << ' ' << FormatDouble(u(i));
      out << "\nv:";
      for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << FormatDouble(v(i));
      out << '\n';
    }
  } catch (const Error& e) {
    out << "topology: " << e.what() << '\n';
    ok = false;
  }
  const auto schedule_problems = engine::CheckSchedules(cfg.run);
  if (schedule_problems.empty()) {
    out << "schedules: ok\n";
  } else {
    for (const auto& p : schedule_problems) out << "schedules: FAIL " << p << '\n';
  }
  ok = ok && schedule_problems.empty();
  out << (ok ? "valid\n" : "invalid\n");
  return ok ? kExitOk : kExitValidation;
}

int Run(const fs::path& path, const Overrides& o, std::ostream& out, std::ostream& err) {
  return Guard(path, o, err, [&](const config::ExperimentConfig& cfg) {
    const problems::Problem problem = BuildProblem(cfg, err);
    std::ofstream trace = OpenOut(cfg.output.Resolve(cfg.output.trace));
    std::ofstream messages;
    engine::RunHooks hooks;
    hooks.trace = &trace;
    if (cfg.output.write_messages) {
      messages = OpenOut(cfg.output.Resolve(cfg.output.messages));
      hooks.messages = &messages;
    }
    // With perturbations configured the twins ride along, so the trace's
    // max_delta column carries the running privacy budget.
    std::optional<privacy::AuditResult> audit;
    engine::RunResult plain;
    if (!cfg.audit.perturbations.empty()) {
      audit = privacy::RunAudit(cfg.run, problem, cfg.audit, hooks);
    } else {
      plain = engine::Run(cfg.run, problem, hooks);
    }
    const engine::RunResult& result = audit ? audit->run : plain;
    std::ofstream states = OpenOut(cfg.output.Resolve(cfg.output.states));
    engine::WriteStates(states, result.final_states);

    const auto& last = result.trace.back();
    out << "rounds: " << cfg.run.horizon << '\n'
        << "final gap: " << FormatDouble(last.gap) << '\n'
        << "final cons_theta: " << FormatDouble(last.cons_theta) << '\n'
        << "final grad_norm: " << FormatDouble(last.grad_norm) << '\n'
        << "final max_delta: " << FormatDouble(last.max_delta) << '\n';
    if (problem.test_set) {
      std::vector<Eigen::VectorXd> thetas;
      for (const auto& s : result.final_states) thetas.push_back(s.theta);
      out << "final accuracy: "
          << FormatDouble(metrics::MeanAccuracy(thetas, *problem.test_set)) << '\n';
    }
    out << "trace: " << cfg.output.Resolve(cfg.output.trace).string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int Compare(const fs::path& path, const Overrides& o, std::ostream& out,
            std::ostream& err) {
  return Guard(path, o, err, [&](const config::ExperimentConfig& cfg) {
    const problems::Problem problem = BuildProblem(cfg, err);
    engine::RunConfig quantized = cfg.run;
    quantized.quantize = true;
    engine::RunConfig baseline = cfg.run;
    baseline.quantize = false;
    const auto rq = engine::Run(quantized, problem);
    const auto rb = engine::Run(baseline, problem);

    std::ofstream csv = OpenOut(cfg.output.Resolve(cfg.output.compare));
    csv << "t";
    for (const char* prefix : {"quantized_", "baseline_"}) {
      for (std::size_t k = 1; k < metrics::kTraceColumns.size() - 1; ++k) {
        csv << ',' << prefix << metrics::kTraceColumns[k];
      }
    }
    csv << '\n';
    const auto& a = rq.trace.rows();
    const auto& b = rb.trace.rows();
    for (std::size_t r = 0; r < a.size(); ++r) {
      csv << a[r].t;
      for (const auto* row : {&a[r], &b[r]}) {
        csv << ',' << FormatDouble(row->f_bar) << ',' << FormatDouble(row->gap) << ','
            << FormatDouble(row->grad_norm) << ',' << FormatDouble(row->cons_theta)
            << ',' << FormatDouble(row->cons_psi);
      }
      csv << '\n';
    }

    std::ostringstream summary;
    summary << "final gap (quantized): " << FormatDouble(a.back().gap) << '\n'
            << "final gap (baseline): " << FormatDouble(b.back().gap) << '\n'
            << "final gap difference: " << FormatDouble(a.back().gap - b.back().gap)
            << '\n';
    if (problem.test_set) {
      std::vector<Eigen::VectorXd> tq, tb;
      for (const auto& s : rq.final_states) tq.push_back(s.theta);
      for (const auto& s : rb.final_states) tb.push_back(s.theta);
      const double aq = metrics::MeanAccuracy(tq, *problem.test_set);
      const double ab = metrics::MeanAccuracy(tb, *problem.test_set);
      summary << "final accuracy (quantized): " << FormatDouble(aq) << '\n'
              << "final accuracy (baseline): " << FormatDouble(ab) << '\n'
              << "final accuracy difference: " << FormatDouble(aq - ab) << '\n';
    }
    std::istringstream lines(summary.str());
    for (std::string line; std::getline(lines, line);) csv << "# " << line << '\n';
    out << summary.str();
    return static_cast<int>(kExitOk);
  });
}

int Audit(const fs::path& path, const Overrides& o, std::ostream& out,
          std::ostream& err) {
  return Guard(path, o, err, [&](const config::ExperimentConfig& cfg) {
    const problems::Problem problem = BuildProblem(cfg, err);
    std::ofstream trace = OpenOut(cfg.output.Resolve(cfg.output.trace));
    engine::RunHooks hooks;
    hooks.trace = &trace;
    const auto audit = privacy::RunAudit(cfg.run, problem, cfg.audit, hooks);
    std::ofstream report = OpenOut(cfg.output.Resolve(cfg.output.audit));
    privacy::WriteAuditReport(report, audit, cfg.run);
    report.flush();
    if (!report) throw Error(ErrorKind::kIo, "writing the audit report failed");

    out << "twins: " << audit.twins.size() << '\n';
    const auto& series = audit.max_delta_series;
    const int horizon = static_cast<int>(series.size()) - 1;
    out << "max_i delta^i:";
    for (int q = 1; q <= 4; ++q) {
      const int t = horizon * q / 4;
      out << " t=" << t << ':' << FormatDouble(series[t]);
    }
    out << '\n';
    for (const auto& tw : audit.twins) {
      out << "agent " << tw.spec.agent << " (round " << tw.spec.round << "): (0, "
          << FormatDouble(tw.ledger.total()) << ")-LDP";
      if (!tw.ledger.valid()) out << " [accounting invalid]";
      if (tw.budget) {
        out << ", required d0 " << FormatDouble(tw.bound->required_d0) << " vs d0 "
            << FormatDouble(cfg.run.quant[tw.spec.agent].d0) << ": "
            << (tw.budget->satisfied ? "satisfied" : "not satisfied");
      }
      if (!tw.bound_ok.empty()) {
        const bool all = std::all_of(tw.bound_ok.begin(), tw.bound_ok.end(),
                                     [](char c) { return c != 0; });
        out << ", analytic bound " << (all ? "holds" : "VIOLATED");
      }
      out << '\n';
    }
    for (const auto& note : audit.notes) out << "note: " << note << '\n';
    out << "max delta: " << FormatDouble(audit.max_delta) << '\n'
        << "report: " << cfg.output.Resolve(cfg.output.audit).string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int Main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ldpq: quantized private distributed online optimization"};
  app.require_subcommand(1);
  std::string path;
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<std::string> out_dir;

  int (*command)(const fs::path&, const Overrides&, std::ostream&, std::ostream&) = nullptr;
  struct Entry {
    const char* name;
    const char* help;
    decltype(command) fn;
  };
  const Entry entries[] = {
      {"validate", "check topology and schedule constraints", &Validate},
      {"run", "execute the configured experiment", &Run},
      {"compare", "quantized run against the unquantized baseline", &Compare},
      {"audit", "twin-run privacy audit", &Audit},
  };
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("config", path, "experiment config (YAML)")->required();
    sub->add_option("--seed", seed, "override run.seed");
    sub->add_option("--horizon", horizon, "override run.horizon");
    sub->add_option("--out-dir", out_dir, "override output.dir");
    sub->callback([&command, fn = e.fn] { command = fn; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n' << app.help();
    return kExitRuntime;
  }
  Overrides o;
  o.seed = seed;
  o.horizon = horizon;
  if (out_dir) o.out_dir = fs::path(*out_dir);
  return command(path, o, out, err);
}

}  // namespace ldpq::cli
