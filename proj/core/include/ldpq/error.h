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

#ifndef LDPQ_ERROR_H_
#define LDPQ_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace ldpq {

// Categories of failure raised by the library. Validation problems that a
// caller is expected to inspect (topology reports, schedule constraints,
// privacy validity flags) are returned as values instead.
enum class ErrorKind {
  kArgument,       // malformed input to a pure function
  kStructural,     // shape mismatch or a graph that violates reachability
  kNumerical,      // a solve that did not meet its residual tolerance
  kConfiguration,  // invalid run configuration or input file
  kState,          // operation issued against state that cannot serve it
  kPrecondition,   // a documented hypothesis of an operation is violated
  kIo,             // stream or filesystem failure
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ldpq

#endif  // LDPQ_ERROR_H_
