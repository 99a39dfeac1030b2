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

#include "lidarprep/fusion.hpp"

#include <algorithm>
#include <stdexcept>

#include "lidarprep/parallel.hpp"

namespace lidarprep {

FeatureMatrix fuse_point_features(const FeatureMatrix& sem, const FeatureMatrix& geo) {
  if (sem.count != geo.count) {
    throw std::invalid_argument("fusion: semantic and geometric point counts differ");
  }
  FeatureMatrix out;
  out.count = geo.count;
  out.dim = sem.dim + geo.dim;
  out.values.assign(static_cast<std::size_t>(out.count) * out.dim, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < out.count; ++i) {
    double* row = out.values.data() + out.at(i);
    std::copy_n(sem.values.data() + sem.at(i), sem.dim, row);
    std::copy_n(geo.values.data() + geo.at(i), geo.dim, row + sem.dim);
  }
  return out;
}

std::vector<double> aggregate_voxel(const FeatureMatrix& fused,
                                    const std::vector<std::int64_t>& members, int dim_sem,
                                    const PoolingConfig& cfg) {
  if (members.empty()) throw std::invalid_argument("fusion: cannot pool an empty voxel");
  if (dim_sem < 0 || dim_sem > fused.dim) {
    throw std::invalid_argument("fusion: semantic width exceeds the fused row width");
  }
  const std::size_t k = members.size();
  std::vector<double> out(fused.dim, 0.0);
  std::vector<double> column(k);
  for (int c = 0; c < fused.dim; ++c) {
    for (std::size_t m = 0; m < k; ++m) {
      column[m] = fused.values[fused.at(members[m]) + c];
    }
    const Pooling pool = (c < dim_sem) ? cfg.semantic_pool : cfg.geometric_pool;
    if (pool == Pooling::kMax) {
      out[c] = *std::max_element(column.begin(), column.end());
    } else {
      // Summing in sorted order makes the mean independent of member order.
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (double v : column) sum += v;
      out[c] = sum / static_cast<double>(k);
    }
  }
  return out;
}

VoxelFeatureTensor assemble(const PointCloud& cloud, const FeatureMatrix& sem,
                            const VoxelSpec& spec, const PoolingConfig& cfg, bool include_time,
                            const AffineMap* affine) {
  const VoxelGrid grid = build_grid(cloud, spec);
  FeatureMatrix geo = decorate_cloud(cloud, spec, include_time);
  if (affine) geo = apply_affine(geo, *affine);
  const FeatureMatrix fused = fuse_point_features(sem, geo);

  VoxelFeatureTensor out;
  out.spec = spec;
  out.dim_sem = sem.dim;
  out.dim_geo = geo.dim;
  out.coords = grid.coords;
  out.features.assign(grid.cell_count() * static_cast<std::size_t>(out.dim()), 0.0);
  const std::int64_t ncells = static_cast<std::int64_t>(grid.cell_count());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t cell = 0; cell < ncells; ++cell) {
    const std::vector<double> pooled =
        aggregate_voxel(fused, grid.cell_points[cell], out.dim_sem, cfg);
    std::copy(pooled.begin(), pooled.end(), out.features.begin() + out.at(cell));
  }
  return out;
}

}  // namespace lidarprep
