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

#include "ldpq/random.h"

#include <cassert>

namespace ldpq {
namespace {

std::uint32_t Lo(std::uint64_t x) { return static_cast<std::uint32_t>(x); }
std::uint32_t Hi(std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) : engine_(seed) {}

RandomStream::RandomStream(std::seed_seq& seq) : engine_(seq) {}

RandomStream RandomStream::Derive(std::uint64_t master_seed,
                                  StreamPurpose purpose, std::uint64_t a,
                                  std::uint64_t b) {
  std::seed_seq seq{Lo(master_seed), Hi(master_seed),
                    static_cast<std::uint32_t>(purpose),
                    Lo(a), Hi(a), Lo(b), Hi(b)};
  return RandomStream(seq);
}

double RandomStream::Uniform() {
  ++uniforms_drawn_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::Normal() { return normal_(engine_); }

std::uint64_t RandomStream::Below(std::uint64_t n) {
  assert(n > 0);
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(engine_);
}

}  // namespace ldpq
