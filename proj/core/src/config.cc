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

#include "ldpq/config.h"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ldpq/error.h"

namespace ldpq::config {
namespace {

class Reader {
 public:
  Reader(std::string name, std::filesystem::path base)
      : name_(std::move(name)), base_(std::move(base)) {}

  [[noreturn]] void Fail(const YAML::Node& node, const std::string& msg) const {
    std::string where = name_;
    if (node.IsDefined() && node.Mark().line >= 0) {
      where += ":" + std::to_string(node.Mark().line + 1);
    }
    throw Error(ErrorKind::kConfiguration, where + ": " + msg);
  }

  void RequireMap(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) Fail(node, what + " must be a mapping");
  }

  void CheckKeys(const YAML::Node& node, const std::string& section,
                 std::initializer_list<std::string_view> allowed) const {
    const std::set<std::string_view> ok(allowed);
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) Fail(kv.first, "unknown key '" + key + "' in " + section);
    }
  }

  template <typename T>
  T As(const YAML::Node& node, const std::string& key) const {
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      Fail(node, "bad value for '" + key + "'");
    }
  }

  template <typename T>
  void Maybe(const YAML::Node& parent, const std::string& key, T& out) const {
    if (const YAML::Node n = parent[key]) out = As<T>(n, key);
  }

  template <typename T>
  void Maybe(const YAML::Node& parent, const std::string& key,
             std::optional<T>& out) const {
    if (const YAML::Node n = parent[key]) out = As<T>(n, key);
  }

  std::filesystem::path Path(const YAML::Node& node, const std::string& key) const {
    std::filesystem::path p = As<std::string>(node, key);
    return (p.is_absolute() ? p : base_ / p).lexically_normal();
  }

  Eigen::MatrixXd Matrix(const YAML::Node& node, const std::string& key) const {
    if (!node.IsSequence() || node.size() == 0) Fail(node, key + " must be a list of rows");
    const auto rows = static_cast<Eigen::Index>(node.size());
    Eigen::MatrixXd out;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const YAML::Node row = node[i];
      if (!row.IsSequence()) Fail(row, key + " row must be a list");
      if (i == 0) out.resize(rows, static_cast<Eigen::Index>(row.size()));
      if (static_cast<Eigen::Index>(row.size()) != out.cols()) {
        Fail(row, key + " has ragged rows");
      }
      for (Eigen::Index j = 0; j < out.cols(); ++j) out(i, j) = As<double>(row[j], key);
    }
    return out;
  }

  // Scalar, list of m values, or {base, step} meaning base + step * i for
  // agents i = 1..m.
  std::vector<double> PerAgent(const YAML::Node& node, const std::string& key,
                               int m) const {
    std::vector<double> out;
    if (node.IsScalar()) {
      out.assign(m, As<double>(node, key));
    } else if (node.IsSequence()) {
      if (static_cast<int>(node.size()) != m) {
        Fail(node, key + " lists " + std::to_string(node.size()) +
                       " values for " + std::to_string(m) + " agents");
      }
      for (const auto& v : node) out.push_back(As<double>(v, key));
    } else if (node.IsMap()) {
      CheckKeys(node, key, {"base", "step"});
      if (!node["base"]) Fail(node, key + " needs 'base'");
      const double base = As<double>(node["base"], key);
      double step = 0.0;
      Maybe(node, "step", step);
      for (int i = 1; i <= m; ++i) out.push_back(base + step * i);
    } else {
      Fail(node, "bad value for '" + key + "'");
    }
    return out;
  }

 private:
  std::string name_;
  std::filesystem::path base_;
};

topology::WeightMatrices BaseGraph(const Reader& rd, const YAML::Node& g,
                                   std::string& label) {
  std::string name = "explicit";
  rd.Maybe(g, "template", name);
  label = name;
  if (name == "explicit") {
    if (!g["R"] || !g["C"]) rd.Fail(g, "explicit graph needs R and C");
    return {rd.Matrix(g["R"], "R"), rd.Matrix(g["C"], "C")};
  }
  if (g["R"] || g["C"]) rd.Fail(g, "R/C given together with a template");
  if (name == "ring") {
    int agents = 5;
    double weight = 0.3;
    rd.Maybe(g, "agents", agents);
    rd.Maybe(g, "weight", weight);
    if (agents < 2) rd.Fail(g["agents"], "ring needs at least 2 agents");
    return topology::Ring(agents, weight);
  }
  if (g["agents"] || g["weight"]) rd.Fail(g, "agents/weight only apply to ring");
  if (name == "three_node") return topology::ThreeNodeExample();
  if (name == "five_node") return topology::FiveNodeExample();
  rd.Fail(g["template"], "unknown graph template '" + name + "'");
}

// scale_r / scale_c multiply the whole matrix; zero sums and signs survive
// any positive factor.
topology::WeightMatrices ParseGraph(const Reader& rd, const YAML::Node& g,
                                    std::string& label) {
  rd.RequireMap(g, "graph");
  rd.CheckKeys(g, "graph",
               {"template", "agents", "weight", "R", "C", "scale_r", "scale_c"});
  topology::WeightMatrices w = BaseGraph(rd, g, label);
  double scale_r = 1.0;
  double scale_c = 1.0;
  rd.Maybe(g, "scale_r", scale_r);
  rd.Maybe(g, "scale_c", scale_c);
  if (!(scale_r > 0.0)) rd.Fail(g["scale_r"], "scale_r must be positive");
  if (!(scale_c > 0.0)) rd.Fail(g["scale_c"], "scale_c must be positive");
  if (scale_r != 1.0 || scale_c != 1.0) {
    w.R *= scale_r;
    w.C *= scale_c;
    std::ostringstream os;
    os << label << " (R x" << scale_r << ", C x" << scale_c << ")";
    label = os.str();
  }
  return w;
}

void ParseProblem(const Reader& rd, const YAML::Node& p, problems::ProblemSpec& spec) {
  rd.RequireMap(p, "problem");
  rd.CheckKeys(p, "problem",
               {"kind", "dimension", "batch", "window", "corpus", "test_corpus",
                "optimum_cache", "generator", "test_points", "target_spread",
                "target_noise", "grad_l1_bound"});
  if (const YAML::Node k = p["kind"]) {
    try {
      spec.kind = problems::ParseLossKind(rd.As<std::string>(k, "kind"));
    } catch (const Error& e) {
      rd.Fail(k, "kind must be logistic or quadratic");
    }
  }
  rd.Maybe(p, "dimension", spec.dimension);
  rd.Maybe(p, "batch", spec.batch);
  rd.Maybe(p, "window", spec.window);
  if (p["corpus"]) spec.corpus = rd.Path(p["corpus"], "corpus");
  if (p["test_corpus"]) spec.test_corpus = rd.Path(p["test_corpus"], "test_corpus");
  if (p["optimum_cache"]) spec.optimum_cache = rd.Path(p["optimum_cache"], "optimum_cache");
  rd.Maybe(p, "test_points", spec.test_points);
  rd.Maybe(p, "target_spread", spec.target_spread);
  rd.Maybe(p, "target_noise", spec.target_noise);
  rd.Maybe(p, "grad_l1_bound", spec.grad_l1_bound);
  if (const YAML::Node gen = p["generator"]) {
    rd.RequireMap(gen, "generator");
    rd.CheckKeys(gen, "generator",
                 {"points", "margin", "feature_l1", "weight_norm", "label_noise", "seed"});
    rd.Maybe(gen, "points", spec.generator.points);
    rd.Maybe(gen, "margin", spec.generator.margin);
    rd.Maybe(gen, "feature_l1", spec.generator.feature_l1);
    rd.Maybe(gen, "weight_norm", spec.generator.weight_norm);
    rd.Maybe(gen, "label_noise", spec.generator.label_noise);
    rd.Maybe(gen, "seed", spec.generator.seed);
  }
  spec.generator.dimension = spec.dimension;
  if (spec.window && *spec.window < 1) rd.Fail(p["window"], "window must be >= 1");
}

}  // namespace

ExperimentConfig ParseConfig(std::string_view text, const std::string& source_name,
                             const std::filesystem::path& base_dir, bool strict) {
  const Reader rd(source_name, base_dir);
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorKind::kConfiguration,
                source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) {
    throw Error(ErrorKind::kConfiguration, source_name + ": top level must be a mapping");
  }
  rd.CheckKeys(root, "config",
               {"graph", "schedules", "problem", "run", "privacy", "output"});
  for (const char* required : {"graph", "schedules", "problem", "run"}) {
    if (!root[required]) {
      throw Error(ErrorKind::kConfiguration,
                  source_name + ": missing section '" + required + "'");
    }
  }

  ExperimentConfig cfg;
  engine::RunConfig& run = cfg.run;
  run.weights = ParseGraph(rd, root["graph"], cfg.graph_label);
  const int m = run.weights.agents();

  const YAML::Node s = root["schedules"];
  rd.RequireMap(s, "schedules");
  rd.CheckKeys(s, "schedules", {"lambda0", "nu", "d0", "varsigma"});
  rd.Maybe(s, "lambda0", run.step.lambda0);
  rd.Maybe(s, "nu", run.step.nu);
  if (!s["d0"] || !s["varsigma"]) rd.Fail(s, "schedules need d0 and varsigma");
  const auto d0 = rd.PerAgent(s["d0"], "d0", m);
  const auto vs = rd.PerAgent(s["varsigma"], "varsigma", m);
  run.quant.clear();
  for (int i = 0; i < m; ++i) run.quant.push_back({d0[i], vs[i]});

  ParseProblem(rd, root["problem"], run.problem);

  const YAML::Node r = root["run"];
  rd.RequireMap(r, "run");
  rd.CheckKeys(r, "run",
               {"horizon", "seed", "quantization", "flush_interval", "trace_interval",
                "init_scale", "psi0", "keep_messages"});
  rd.Maybe(r, "horizon", run.horizon);
  rd.Maybe(r, "seed", run.seed);
  rd.Maybe(r, "quantization", run.quantize);
  rd.Maybe(r, "flush_interval", run.flush_interval);
  rd.Maybe(r, "trace_interval", run.trace_interval);
  rd.Maybe(r, "init_scale", run.init_scale);
  rd.Maybe(r, "keep_messages", run.keep_messages);
  if (const YAML::Node psi0 = r["psi0"]) {
    const auto v = rd.As<std::string>(psi0, "psi0");
    if (v == "zero") run.psi0_zero = true;
    else if (v == "normal") run.psi0_zero = false;
    else rd.Fail(psi0, "psi0 must be normal or zero");
  }

  int perturbation_round = 0;
  std::string mode = "default";
  if (const YAML::Node p = root["privacy"]) {
    rd.RequireMap(p, "privacy");
    rd.CheckKeys(p, "privacy",
                 {"perturbations", "perturbation_round", "constants", "lipschitz",
                  "fit_horizon", "scan_cap"});
    rd.Maybe(p, "perturbation_round", perturbation_round);
    rd.Maybe(p, "lipschitz", cfg.audit.lipschitz);
    rd.Maybe(p, "fit_horizon", cfg.audit.fit_horizon);
    rd.Maybe(p, "scan_cap", cfg.audit.scan_cap);
    if (const YAML::Node c = p["constants"]) {
      rd.RequireMap(c, "constants");
      rd.CheckKeys(c, "constants", {"C_z", "P_z"});
      rd.Maybe(c, "C_z", cfg.audit.c_z);
      rd.Maybe(c, "P_z", cfg.audit.p_z);
    }
    if (const YAML::Node list = p["perturbations"]) {
      if (list.IsScalar()) {
        mode = rd.As<std::string>(list, "perturbations");
        if (mode != "default" && mode != "none") {
          rd.Fail(list, "perturbations must be default, none or a list");
        }
      } else if (list.IsSequence()) {
        mode = "explicit";
        for (const auto& item : list) {
          rd.RequireMap(item, "perturbation");
          rd.CheckKeys(item, "perturbation", {"agent", "round", "salt"});
          privacy::PerturbationSpec spec;
          if (!item["agent"]) rd.Fail(item, "perturbation needs an agent");
          spec.agent = rd.As<int>(item["agent"], "agent");
          spec.round = perturbation_round;
          rd.Maybe(item, "round", spec.round);
          rd.Maybe(item, "salt", spec.salt);
          if (spec.agent < 0 || spec.agent >= m) rd.Fail(item["agent"], "agent out of range");
          cfg.audit.perturbations.push_back(spec);
        }
      } else {
        rd.Fail(list, "perturbations must be default, none or a list");
      }
    }
  }
  if (mode == "default") {
    cfg.audit.perturbations = privacy::DefaultPerturbations(m, perturbation_round);
  }

  cfg.output.dir = (base_dir / "out").lexically_normal();
  if (const YAML::Node o = root["output"]) {
    rd.RequireMap(o, "output");
    rd.CheckKeys(o, "output",
                 {"dir", "trace", "messages", "states", "audit", "compare", "write_messages"});
    if (o["dir"]) cfg.output.dir = rd.Path(o["dir"], "dir");
    rd.Maybe(o, "trace", cfg.output.trace);
    rd.Maybe(o, "messages", cfg.output.messages);
    rd.Maybe(o, "states", cfg.output.states);
    rd.Maybe(o, "audit", cfg.output.audit);
    rd.Maybe(o, "compare", cfg.output.compare);
    rd.Maybe(o, "write_messages", cfg.output.write_messages);
  }

  if (strict) engine::RequireValid(run);
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path.string(), path.parent_path(), strict);
}

}  // namespace ldpq::config
