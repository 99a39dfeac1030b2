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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

// Conventions used everywhere in this library: x forward, y left, z up,
// sensor at the origin of each frame; yaw is counter-clockwise about +z with
// zero along +x. All computation is double precision; 32-bit floats appear
// only in serialized payloads.

namespace lidarprep {

inline constexpr double kPi = 3.14159265358979323846;

struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
  double t_rel = 0.0;  // seconds relative to the key frame; 0 for single frame
};

// Point order is stable across all operations: the index of a point is its
// identity, and projection maps refer to these indices.
struct PointCloud {
  std::vector<Point> points;
  std::string frame_id;
  // Raw sensor ring ids carried through file round trips, never interpreted.
  // Either empty or one entry per point.
  std::vector<float> rings;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

struct RigidTransform {
  // Row-major 3x3 rotation, must be orthonormal with determinant +1.
  std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
  std::array<double, 3> translation{0, 0, 0};

  static RigidTransform identity() { return {}; }
  static RigidTransform from_translation(double tx, double ty, double tz);
  static RigidTransform yaw_about_z(double yaw);
};

// Orthonormality check: every entry of R*R^T - I within tol and det(R) > 0.
bool is_valid(const RigidTransform& t, double tol = 1e-9);
bool is_identity(const RigidTransform& t, double tol = 1e-9);

Point transform_point(const RigidTransform& t, const Point& p);
PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t);
RigidTransform compose(const RigidTransform& t1, const RigidTransform& t2);
RigidTransform invert(const RigidTransform& t);

// BEV-oriented 3D bounding box.
struct OrientedBox {
  double cx = 0.0, cy = 0.0, cz = 0.0;  // center, meters
  double l = 0.0, w = 0.0, h = 0.0;     // extents, meters
  double yaw = 0.0;                     // radians, normalized to (-pi, pi]
  std::string category;
  double score = 0.0;
  std::int64_t num_points = 0;
};

double normalize_yaw(double yaw);  // maps any angle into (-pi, pi]
bool is_valid(const OrientedBox& b);

// The four BEV corners of the l x w rectangle centered at (cx, cy) rotated by
// yaw, in counter-clockwise order.
std::array<std::array<double, 2>, 4> box_bev_corners(const OrientedBox& b);

// Point coordinates in the box frame (center at origin, yaw removed).
Point box_local_coords(const OrientedBox& b, const Point& p);

// Half-open membership test: local coordinates in [-e/2, e/2) on every axis.
bool point_in_box(const OrientedBox& b, const Point& p);

}  // namespace lidarprep
