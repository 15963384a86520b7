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

#include "ldpq/error.h"

namespace ldpq {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kArgument:
      return "argument";
    case ErrorKind::kStructural:
      return "structural";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kConfiguration:
      return "configuration";
    case ErrorKind::kState:
      return "state";
    case ErrorKind::kPrecondition:
      return "precondition";
    case ErrorKind::kIo:
      return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + " error: " +
                         message),
      kind_(kind) {}

}  // namespace ldpq
