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

#ifndef LIDARPREP_SEMANTIC_HPP_
#define LIDARPREP_SEMANTIC_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lidarprep/range_image.hpp"

namespace lidarprep {

// Dense per-pixel feature tensor over a range-image raster, row-major
// [row][col][component].
struct FeatureMap {
  int rows = 0;
  int cols = 0;
  int dim = 0;
  std::vector<double> values;

  std::size_t at(int row, int col) const {
    return (static_cast<std::size_t>(row) * cols + col) * dim;
  }
};

inline constexpr int kMinFeatureDim = 8;
inline constexpr int kDefaultFeatureDim = 64;

// Analytic per-pixel features, a deterministic stand-in for a learned
// extractor. Layout per pixel:
//   [0..4]  raw channels: range, height, elevation, reflectance, mask
//   [5..8]  3x3 range statistics: mean, standard deviation, horizontal and
//           vertical central differences. Unoccupied neighbors contribute a
//           zero range; rows clamp at the elevation borders and columns wrap
//           on a full-circle grid (clamp otherwise).
//   [9..)   sinusoidal encodings of (row, col).
// A dim below 9 truncates the statistics block. Throws std::invalid_argument
// when dim < kMinFeatureDim.
FeatureMap extract_reference_features(const RangeImage& img, int dim = kDefaultFeatureDim);

// Single-pass reference implementation; must match extract_reference_features
// bit for bit.
FeatureMap extract_reference_features_serial(const RangeImage& img, int dim = kDefaultFeatureDim);

// Per-point feature rows, row-major [point][component].
struct FeatureMatrix {
  std::int64_t count = 0;
  int dim = 0;
  std::vector<double> values;

  std::size_t at(std::int64_t point) const { return static_cast<std::size_t>(point) * dim; }
};

// Gathers each surviving point's pixel feature vector; points that did not
// survive projection (out of view, degenerate, or displaced by a closer point
// in the same pixel) receive the all-zero vector. The map dimensions must
// match the image raster.
FeatureMatrix sample_point_features(const FeatureMap& fmap, const RangeImage& img);

}  // namespace lidarprep

#endif  // LIDARPREP_SEMANTIC_HPP_
