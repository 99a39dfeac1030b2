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

#include "lidarprep/rng.hpp"

#include <stdexcept>

namespace lidarprep {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitRng::next_u64() {
  state_ += kGolden;
  return mix(state_);
}

double SplitRng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

std::uint64_t SplitRng::uniform_index(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index: n must be > 0");
  return next_u64() % n;
}

SplitRng SplitRng::split(std::uint64_t label) const {
  return SplitRng(mix(seed_ + (label + 1) * kGolden));
}

std::uint64_t hash_u64(std::uint64_t seed, std::uint64_t counter) {
  return mix(seed + (counter + 1) * kGolden);
}

double hash_unit_double(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(hash_u64(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace lidarprep
