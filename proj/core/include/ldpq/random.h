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

#ifndef LDPQ_RANDOM_H_
#define LDPQ_RANDOM_H_

#include <cstdint>
#include <random>

namespace ldpq {

// Independent substreams are derived from a master seed and a purpose tag so
// that, e.g., quantizer draws never perturb the data stream of the same agent.
enum class StreamPurpose : std::uint32_t {
  kInit = 1,
  kQuantizer = 2,
  kData = 3,
  kPerturbation = 4,
  kCorpus = 5,
  kProblem = 6,
};

// Single-owner pseudo-random stream. Not thread-safe; give each agent its own.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  static RandomStream Derive(std::uint64_t master_seed, StreamPurpose purpose,
                             std::uint64_t a = 0, std::uint64_t b = 0);

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Normal();
  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n);

  // Number of Uniform() calls made so far.
  std::uint64_t uniforms_drawn() const { return uniforms_drawn_; }

 private:
  explicit RandomStream(std::seed_seq& seq);

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
  std::uint64_t uniforms_drawn_ = 0;
};

}  // namespace ldpq

#endif  // LDPQ_RANDOM_H_
