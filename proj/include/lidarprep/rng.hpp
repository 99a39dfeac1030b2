// Copyright 2026 the lidarprep authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>

namespace lidarprep {

// Seedable, splittable deterministic generator built on splitmix64. Draw
// sequences made from it are part of the reproducibility contract: the same
// seed yields the same stream on every platform. split(label) derives an
// independent child stream from the parent's seed and the label without
// consuming any parent draws.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t next_u64();

  // Uniform double in [lo, hi), 53-bit resolution.
  double uniform(double lo, double hi);

  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  SplitRng split(std::uint64_t label) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
};

// Stateless hash of (seed, counter) with the same mixing function; used where
// sample i must be a pure function of i (parallel Monte Carlo draws).
std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t counter);
double hash_unit_double(std::uint64_t seed, std::uint64_t counter);  // [0, 1)

}  // namespace lidarprep
