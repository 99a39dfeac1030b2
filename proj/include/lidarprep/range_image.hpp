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
#include <optional>
#include <utility>
#include <vector>

#include "lidarprep/geometry.hpp"

namespace lidarprep {

// Evenly spaced angular grid. Angles are degrees here; azimuth is measured
// counter-clockwise from +x, elevation from the horizontal plane. Bins are
// half-open [min, max); an azimuth of exactly +max wraps to column 0 when the
// span is a full circle.
struct GridSpec {
  double az_min_deg = -180.0;
  double az_max_deg = 180.0;
  double az_step_deg = 0.3125;
  double el_min_deg = -30.0;
  double el_max_deg = 10.0;
  double el_step_deg = 1.25;

  int cols() const;
  int rows() const;
  bool full_circle() const;

  // Same field of view with both steps divided by n (n x finer grid).
  GridSpec refined(int n) const;
};

// Throws std::invalid_argument unless steps are positive and both spans are
// integer multiples of their steps within 1e-9.
void validate(const GridSpec& spec);

struct SphericalCoords {
  double azimuth_deg = 0.0;    // (-180, 180]
  double elevation_deg = 0.0;  // from horizontal plane
  double range_m = 0.0;
};

// Throws std::domain_error for a point at the sensor origin (range 0).
SphericalCoords spherical_of(const Point& p);

enum class PointStatus : std::uint8_t {
  kSurvived = 0,
  kOutOfFov = 1,
  kDegenerate = 2,
  kConflictDiscarded = 3,
};

struct PointPixel {
  std::int32_t row = -1;  // valid only when status == kSurvived
  std::int32_t col = -1;
  PointStatus status = PointStatus::kOutOfFov;

  bool survived() const { return status == PointStatus::kSurvived; }
};

// Multi-channel raster over the angular grid. Channel values come from the
// surviving point of each pixel: range in meters, height = sensor-frame z,
// elevation in radians, raw reflectance, occupancy mask in {0, 1}.
struct RangeImage {
  GridSpec spec;
  int rows = 0;
  int cols = 0;
  std::vector<double> range;
  std::vector<double> height;
  std::vector<double> elevation;
  std::vector<double> reflectance;
  std::vector<double> mask;
  // Per input point: its pixel when it survived, otherwise the reason it
  // did not. Empty for images loaded from disk.
  std::vector<PointPixel> point_to_pixel;
  // Per pixel: index of the surviving point, -1 when unoccupied. Empty for
  // images loaded from disk.
  std::vector<std::int64_t> pixel_to_point;

  std::size_t pixel_count() const { return static_cast<std::size_t>(rows) * cols; }
  std::int64_t occupied_count() const;
  std::size_t at(int row, int col) const { return static_cast<std::size_t>(row) * cols + col; }
};

// Pixel-conflict priority. kMinRange keeps the closest point; ties on range
// keep the lower point index. kKeyTimeThenMinRange prefers the smallest
// |t_rel| first (multi-sweep fusion), then falls back to the same order.
enum class ConflictRule : std::uint8_t { kMinRange, kKeyTimeThenMinRange };

RangeImage project(const PointCloud& cloud, const GridSpec& spec,
                   ConflictRule rule = ConflictRule::kMinRange);

// Single-pass reference implementation; must match project() bit for bit.
RangeImage project_serial(const PointCloud& cloud, const GridSpec& spec,
                          ConflictRule rule = ConflictRule::kMinRange);

// Fraction of occupied pixels.
double occupancy_rate(const RangeImage& img);

// Reconstructs a point from the stored range and elevation and the azimuth
// bin center. Throws std::out_of_range on an empty pixel or bad coordinates.
Point unproject_pixel(const RangeImage& img, int row, int col);

enum class Channel : std::uint8_t { kRange, kHeight, kElevation, kReflectance, kMask };

const std::vector<double>& channel_values(const RangeImage& img, Channel ch);

// 8-bit render: linear min-max normalization over occupied pixels (or over
// the given fixed range), unoccupied pixels render 0. A degenerate min==max
// renders occupied pixels as 255.
std::vector<std::uint8_t> render_channel(
    const RangeImage& img, Channel ch,
    std::optional<std::pair<double, double>> out_range = std::nullopt);

}  // namespace lidarprep
