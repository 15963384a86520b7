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

#ifndef LDPQ_TOOLS_CLI_COMMANDS_H_
#define LDPQ_TOOLS_CLI_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ldpq::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitRuntime = 2,
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;
  std::optional<std::filesystem::path> out_dir;
};

int Validate(const std::filesystem::path& config, const Overrides& o,
             std::ostream& out, std::ostream& err);
int Run(const std::filesystem::path& config, const Overrides& o,
        std::ostream& out, std::ostream& err);
int Compare(const std::filesystem::path& config, const Overrides& o,
            std::ostream& out, std::ostream& err);
int Audit(const std::filesystem::path& config, const Overrides& o,
          std::ostream& out, std::ostream& err);

// Parses argv and dispatches to the commands above.
int Main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ldpq::cli

#endif  // LDPQ_TOOLS_CLI_COMMANDS_H_
