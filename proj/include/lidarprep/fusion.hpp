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

#ifndef LIDARPREP_FUSION_HPP_
#define LIDARPREP_FUSION_HPP_

#include <cstdint>
#include <vector>

#include "lidarprep/semantic.hpp"
#include "lidarprep/voxel.hpp"

namespace lidarprep {

enum class Pooling : std::uint8_t { kMax, kAverage };

struct PoolingConfig {
  Pooling semantic_pool = Pooling::kMax;
  Pooling geometric_pool = Pooling::kAverage;
};

// Row-wise concatenation [semantic | geometric]. A zero-width semantic matrix
// passes the geometric rows through unchanged.
FeatureMatrix fuse_point_features(const FeatureMatrix& sem, const FeatureMatrix& geo);

// Pools the selected rows element-wise: the first dim_sem components with the
// semantic pooling, the rest with the geometric pooling. The average is
// computed over component values sorted ascending, so the result is
// bit-identical under any permutation of the members. Throws on an empty
// member list.
std::vector<double> aggregate_voxel(const FeatureMatrix& fused,
                                    const std::vector<std::int64_t>& members, int dim_sem,
                                    const PoolingConfig& cfg);

// Sparse per-voxel feature tensor: one row of width dim_sem + dim_geo per
// occupied cell, parallel to coords (sorted ascending).
struct VoxelFeatureTensor {
  VoxelSpec spec;
  int dim_sem = 0;
  int dim_geo = 0;
  std::vector<VoxelCoord> coords;
  std::vector<double> features;

  int dim() const { return dim_sem + dim_geo; }
  std::size_t at(std::size_t cell) const { return cell * dim(); }
};

// Full chain: occupancy grid, geometric decoration (optionally followed by an
// affine map), concatenation with the per-point semantic rows, and per-voxel
// pooling. sem must have one row per point; pass a zero-width matrix with a
// matching count to run purely geometric.
VoxelFeatureTensor assemble(const PointCloud& cloud, const FeatureMatrix& sem,
                            const VoxelSpec& spec, const PoolingConfig& cfg,
                            bool include_time = false, const AffineMap* affine = nullptr);

}  // namespace lidarprep

#endif  // LIDARPREP_FUSION_HPP_
