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

#ifndef LIDARPREP_VOXEL_HPP_
#define LIDARPREP_VOXEL_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "lidarprep/geometry.hpp"
#include "lidarprep/semantic.hpp"

namespace lidarprep {

enum class VoxelMode : std::uint8_t { kVoxel, kPillar };

// Scene partition. Bins are half-open: a point belongs to cell i on an axis
// when min + i*step <= coordinate < min + (i+1)*step, and coordinates at or
// beyond the upper extent are out of bounds. Extents must be integer
// multiples of the cell sizes; pillar mode requires dz to equal the full
// vertical span.
struct VoxelSpec {
  double x_min = -51.2, x_max = 51.2;
  double y_min = -51.2, y_max = 51.2;
  double z_min = -3.0, z_max = 3.0;
  double dx = 0.1, dy = 0.1, dz = 0.15;
  VoxelMode mode = VoxelMode::kVoxel;

  static VoxelSpec voxels(double resolution = 0.1);
  static VoxelSpec pillars(double resolution = 0.1);

  int nx() const;
  int ny() const;
  int nz() const;
};

void validate(const VoxelSpec& spec);

struct VoxelCoord {
  std::int32_t ix = 0;
  std::int32_t iy = 0;
  std::int32_t iz = 0;

  friend auto operator<=>(const VoxelCoord&, const VoxelCoord&) = default;
};

// Cell of the containing voxel, or nullopt when any coordinate falls outside
// the half-open extents.
std::optional<VoxelCoord> voxel_index(const Point& p, const VoxelSpec& spec);

// Raw per-point geometric decoration: global position, range to the sensor
// origin, and offsets to the containing voxel's center. t_rel rides along for
// multi-frame inputs and occupies the optional eighth component.
struct GeometricFeature {
  double x = 0.0, y = 0.0, z = 0.0;
  double r = 0.0;
  double ox = 0.0, oy = 0.0, oz = 0.0;
  double t_rel = 0.0;
};

inline constexpr int kGeometricDim = 7;
inline constexpr int kGeometricDimWithTime = 8;

// Throws std::out_of_range when the point is outside the spec extents.
GeometricFeature decorate(const Point& p, const VoxelSpec& spec);

// Per-point geometric rows of width kGeometricDim (or ...WithTime). Points
// outside the extents get all-zero rows; they carry no voxel membership and
// are never pooled downstream.
FeatureMatrix decorate_cloud(const PointCloud& cloud, const VoxelSpec& spec,
                             bool include_time = false);

// Sparse occupancy: coords is sorted ascending and cell_points[k] lists the
// indices of the points inside coords[k] in input order.
struct VoxelGrid {
  VoxelSpec spec;
  std::vector<VoxelCoord> coords;
  std::vector<std::vector<std::int64_t>> cell_points;
  std::vector<std::int64_t> out_of_bounds;

  std::size_t cell_count() const { return coords.size(); }
};

VoxelGrid build_grid(const PointCloud& cloud, const VoxelSpec& spec);

// Single-pass reference implementation; must match build_grid bit for bit.
VoxelGrid build_grid_serial(const PointCloud& cloud, const VoxelSpec& spec);

// Dense affine map out = W*v + b applied to every feature row.
struct AffineMap {
  int in_dim = 0;
  int out_dim = 0;
  std::vector<double> weight;  // out_dim x in_dim, row-major
  std::vector<double> bias;    // out_dim

  static AffineMap identity(int dim);
};

void validate(const AffineMap& map);

FeatureMatrix apply_affine(const FeatureMatrix& features, const AffineMap& map);

}  // namespace lidarprep

#endif  // LIDARPREP_VOXEL_HPP_
