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

#include "lidarprep/voxel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lidarprep/parallel.hpp"

namespace lidarprep {

namespace {

int axis_bins(double lo, double hi, double step, const char* axis) {
  if (!(step > 0.0)) throw std::invalid_argument(std::string("voxel: ") + axis + " size must be > 0");
  const double ratio = (hi - lo) / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9) {
    throw std::invalid_argument(std::string("voxel: ") + axis +
                                " extent must be a positive integer multiple of the cell size");
  }
  return static_cast<int>(rounded);
}

std::int64_t bin_of(double v, double lo, double step, int bins) {
  const std::int64_t i = static_cast<std::int64_t>(std::floor((v - lo) / step));
  if (i < 0 || i >= bins) return -1;
  return i;
}

VoxelGrid make_grid(const VoxelSpec& spec) {
  validate(spec);
  VoxelGrid grid;
  grid.spec = spec;
  return grid;
}

// Shared merge: cells keyed by coordinate in a sorted map; appending points in
// ascending index order keeps each list in input order.
VoxelGrid assemble_grid(const VoxelSpec& spec, const std::vector<std::optional<VoxelCoord>>& cells) {
  VoxelGrid grid = make_grid(spec);
  std::map<VoxelCoord, std::vector<std::int64_t>> by_cell;
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(cells.size()); ++i) {
    if (cells[i]) {
      by_cell[*cells[i]].push_back(i);
    } else {
      grid.out_of_bounds.push_back(i);
    }
  }
  grid.coords.reserve(by_cell.size());
  grid.cell_points.reserve(by_cell.size());
  for (auto& [coord, points] : by_cell) {
    grid.coords.push_back(coord);
    grid.cell_points.push_back(std::move(points));
  }
  return grid;
}

}  // namespace

VoxelSpec VoxelSpec::voxels(double resolution) {
  VoxelSpec spec;
  spec.dx = spec.dy = resolution;
  spec.dz = 0.15;
  spec.mode = VoxelMode::kVoxel;
  return spec;
}

VoxelSpec VoxelSpec::pillars(double resolution) {
  VoxelSpec spec;
  spec.dx = spec.dy = resolution;
  spec.dz = spec.z_max - spec.z_min;
  spec.mode = VoxelMode::kPillar;
  return spec;
}

int VoxelSpec::nx() const { return axis_bins(x_min, x_max, dx, "x"); }
int VoxelSpec::ny() const { return axis_bins(y_min, y_max, dy, "y"); }
int VoxelSpec::nz() const { return axis_bins(z_min, z_max, dz, "z"); }

void validate(const VoxelSpec& spec) {
  axis_bins(spec.x_min, spec.x_max, spec.dx, "x");
  axis_bins(spec.y_min, spec.y_max, spec.dy, "y");
  const int nz = axis_bins(spec.z_min, spec.z_max, spec.dz, "z");
  if (spec.mode == VoxelMode::kPillar && nz != 1) {
    throw std::invalid_argument("voxel: pillar mode requires dz to span the full vertical extent");
  }
}

std::optional<VoxelCoord> voxel_index(const Point& p, const VoxelSpec& spec) {
  const std::int64_t ix = bin_of(p.x, spec.x_min, spec.dx, spec.nx());
  const std::int64_t iy = bin_of(p.y, spec.y_min, spec.dy, spec.ny());
  const std::int64_t iz = bin_of(p.z, spec.z_min, spec.dz, spec.nz());
  if (ix < 0 || iy < 0 || iz < 0) return std::nullopt;
  return VoxelCoord{static_cast<std::int32_t>(ix), static_cast<std::int32_t>(iy),
                    static_cast<std::int32_t>(iz)};
}

GeometricFeature decorate(const Point& p, const VoxelSpec& spec) {
  const std::optional<VoxelCoord> cell = voxel_index(p, spec);
  if (!cell) throw std::out_of_range("decorate: point outside the voxel extents");
  GeometricFeature f;
  f.x = p.x;
  f.y = p.y;
  f.z = p.z;
  f.r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  f.ox = p.x - (spec.x_min + (cell->ix + 0.5) * spec.dx);
  f.oy = p.y - (spec.y_min + (cell->iy + 0.5) * spec.dy);
  f.oz = p.z - (spec.z_min + (cell->iz + 0.5) * spec.dz);
  f.t_rel = p.t_rel;
  return f;
}

FeatureMatrix decorate_cloud(const PointCloud& cloud, const VoxelSpec& spec, bool include_time) {
  validate(spec);
  FeatureMatrix out;
  out.count = static_cast<std::int64_t>(cloud.size());
  out.dim = include_time ? kGeometricDimWithTime : kGeometricDim;
  out.values.assign(static_cast<std::size_t>(out.count) * out.dim, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < out.count; ++i) {
    const Point& p = cloud.points[i];
    if (!voxel_index(p, spec)) continue;
    const GeometricFeature f = decorate(p, spec);
    double* row = out.values.data() + out.at(i);
    row[0] = f.x;
    row[1] = f.y;
    row[2] = f.z;
    row[3] = f.r;
    row[4] = f.ox;
    row[5] = f.oy;
    row[6] = f.oz;
    if (include_time) row[7] = f.t_rel;
  }
  return out;
}

VoxelGrid build_grid(const PointCloud& cloud, const VoxelSpec& spec) {
  validate(spec);
  const std::int64_t n = static_cast<std::int64_t>(cloud.size());
  std::vector<std::optional<VoxelCoord>> cells(n);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    cells[i] = voxel_index(cloud.points[i], spec);
  }
  return assemble_grid(spec, cells);
}

VoxelGrid build_grid_serial(const PointCloud& cloud, const VoxelSpec& spec) {
  validate(spec);
  std::vector<std::optional<VoxelCoord>> cells(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    cells[i] = voxel_index(cloud.points[i], spec);
  }
  return assemble_grid(spec, cells);
}

AffineMap AffineMap::identity(int dim) {
  AffineMap map;
  map.in_dim = dim;
  map.out_dim = dim;
  map.weight.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  map.bias.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) map.weight[static_cast<std::size_t>(i) * dim + i] = 1.0;
  return map;
}

void validate(const AffineMap& map) {
  if (map.in_dim < 1 || map.out_dim < 1 ||
      map.weight.size() != static_cast<std::size_t>(map.in_dim) * map.out_dim ||
      map.bias.size() != static_cast<std::size_t>(map.out_dim)) {
    throw std::invalid_argument("affine: weight or bias shape does not match the declared dims");
  }
}

FeatureMatrix apply_affine(const FeatureMatrix& features, const AffineMap& map) {
  validate(map);
  if (features.dim != map.in_dim) {
    throw std::invalid_argument("affine: input width does not match the feature rows");
  }
  FeatureMatrix out;
  out.count = features.count;
  out.dim = map.out_dim;
  out.values.assign(static_cast<std::size_t>(out.count) * out.dim, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < features.count; ++i) {
    const double* in = features.values.data() + features.at(i);
    double* row = out.values.data() + out.at(i);
    for (int o = 0; o < map.out_dim; ++o) {
      double acc = map.bias[o];
      const double* w = map.weight.data() + static_cast<std::size_t>(o) * map.in_dim;
      for (int k = 0; k < map.in_dim; ++k) acc += w[k] * in[k];
      row[o] = acc;
    }
  }
  return out;
}

}  // namespace lidarprep
