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

#ifndef LDPQ_CONFIG_H_
#define LDPQ_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ldpq/engine.h"
#include "ldpq/privacy.h"

namespace ldpq::config {

struct OutputPaths {
  std::filesystem::path dir = "out";
  std::string trace = "trace.csv";
  std::string messages = "messages.csv";
  std::string states = "final_states.csv";
  std::string audit = "audit.csv";
  std::string compare = "compare.csv";
  bool write_messages = true;

  std::filesystem::path Resolve(const std::string& name) const { return dir / name; }
};

struct ExperimentConfig {
  engine::RunConfig run;
  privacy::AuditOptions audit;
  OutputPaths output;
  std::string graph_label;
};

// Parses a YAML experiment description with top-level sections graph,
// schedules, problem, run, privacy and output. Unknown keys and malformed
// values raise Error(kConfiguration) naming the source and line. Relative
// file paths are resolved against `base_dir`. With `strict`, the run
// constraints are checked too (engine::RequireValid).
ExperimentConfig ParseConfig(std::string_view text, const std::string& source_name,
                             const std::filesystem::path& base_dir,
                             bool strict = true);
ExperimentConfig LoadConfig(const std::filesystem::path& path, bool strict = true);

}  // namespace ldpq::config

#endif  // LDPQ_CONFIG_H_
