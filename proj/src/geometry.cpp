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

#include "lidarprep/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "lidarprep/parallel.hpp"

namespace lidarprep {

RigidTransform RigidTransform::from_translation(double tx, double ty, double tz) {
  RigidTransform t;
  t.translation = {tx, ty, tz};
  return t;
}

RigidTransform RigidTransform::yaw_about_z(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  RigidTransform t;
  t.rotation = {c, -s, 0, s, c, 0, 0, 0, 1};
  return t;
}

bool is_valid(const RigidTransform& t, double tol) {
  const auto& r = t.rotation;
  // R * R^T == I entry-wise.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double dot = 0.0;
      for (int k = 0; k < 3; ++k) dot += r[3 * i + k] * r[3 * j + k];
      const double expected = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - expected) > tol) return false;
    }
  }
  const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) -
                     r[1] * (r[3] * r[8] - r[5] * r[6]) +
                     r[2] * (r[3] * r[7] - r[4] * r[6]);
  return det > 0.0;
}

bool is_identity(const RigidTransform& t, double tol) {
  for (int i = 0; i < 9; ++i) {
    const double expected = (i % 4 == 0) ? 1.0 : 0.0;
    if (std::abs(t.rotation[i] - expected) > tol) return false;
  }
  for (double v : t.translation) {
    if (std::abs(v) > tol) return false;
  }
  return true;
}

Point transform_point(const RigidTransform& t, const Point& p) {
  const auto& r = t.rotation;
  Point out = p;
  out.x = r[0] * p.x + r[1] * p.y + r[2] * p.z + t.translation[0];
  out.y = r[3] * p.x + r[4] * p.y + r[5] * p.z + t.translation[1];
  out.z = r[6] * p.x + r[7] * p.y + r[8] * p.z + t.translation[2];
  return out;
}

PointCloud apply_transform(const PointCloud& cloud, const RigidTransform& t) {
  if (!is_valid(t)) throw std::invalid_argument("apply_transform: invalid rigid transform");
  PointCloud out;
  out.frame_id = cloud.frame_id;
  out.rings = cloud.rings;
  out.points.resize(cloud.points.size());
  const std::int64_t n = static_cast<std::int64_t>(cloud.points.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    out.points[i] = transform_point(t, cloud.points[i]);
  }
  return out;
}

RigidTransform compose(const RigidTransform& t1, const RigidTransform& t2) {
  const auto& a = t1.rotation;
  const auto& b = t2.rotation;
  RigidTransform out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += a[3 * i + k] * b[3 * k + j];
      out.rotation[3 * i + j] = sum;
    }
  }
  for (int i = 0; i < 3; ++i) {
    out.translation[i] = a[3 * i] * t2.translation[0] +
                         a[3 * i + 1] * t2.translation[1] +
                         a[3 * i + 2] * t2.translation[2] + t1.translation[i];
  }
  return out;
}

RigidTransform invert(const RigidTransform& t) {
  RigidTransform out;
  // Inverse of an orthonormal rotation is its transpose.
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.rotation[3 * i + j] = t.rotation[3 * j + i];
  }
  for (int i = 0; i < 3; ++i) {
    out.translation[i] = -(out.rotation[3 * i] * t.translation[0] +
                           out.rotation[3 * i + 1] * t.translation[1] +
                           out.rotation[3 * i + 2] * t.translation[2]);
  }
  return out;
}

double normalize_yaw(double yaw) {
  double y = std::fmod(yaw + kPi, 2.0 * kPi);
  if (y <= 0.0) y += 2.0 * kPi;
  return y - kPi;
}

bool is_valid(const OrientedBox& b) {
  return b.l > 0.0 && b.w > 0.0 && b.h > 0.0 && b.yaw > -kPi && b.yaw <= kPi &&
         b.score >= 0.0 && b.score <= 1.0 && b.num_points >= 0;
}

std::array<std::array<double, 2>, 4> box_bev_corners(const OrientedBox& b) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double hl = 0.5 * b.l;
  const double hw = 0.5 * b.w;
  // Local corners in counter-clockwise order.
  const double lx[4] = {hl, -hl, -hl, hl};
  const double ly[4] = {hw, hw, -hw, -hw};
  std::array<std::array<double, 2>, 4> out{};
  for (int i = 0; i < 4; ++i) {
    out[i][0] = b.cx + c * lx[i] - s * ly[i];
    out[i][1] = b.cy + s * lx[i] + c * ly[i];
  }
  return out;
}

Point box_local_coords(const OrientedBox& b, const Point& p) {
  const double c = std::cos(b.yaw);
  const double s = std::sin(b.yaw);
  const double dx = p.x - b.cx;
  const double dy = p.y - b.cy;
  Point out = p;
  out.x = c * dx + s * dy;
  out.y = -s * dx + c * dy;
  out.z = p.z - b.cz;
  return out;
}

bool point_in_box(const OrientedBox& b, const Point& p) {
  const Point local = box_local_coords(b, p);
  return local.x >= -0.5 * b.l && local.x < 0.5 * b.l &&
         local.y >= -0.5 * b.w && local.y < 0.5 * b.w &&
         local.z >= -0.5 * b.h && local.z < 0.5 * b.h;
}

}  // namespace lidarprep
