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

#include "lidarprep/range_image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lidarprep/parallel.hpp"

namespace lidarprep {

namespace {

constexpr double kDegPerRad = 180.0 / kPi;

int span_bins(double lo, double hi, double step, const char* axis) {
  if (!(step > 0.0)) throw std::invalid_argument(std::string("grid: ") + axis + " step must be > 0");
  const double ratio = (hi - lo) / step;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9) {
    throw std::invalid_argument(std::string("grid: ") + axis +
                                " span must be a positive integer multiple of the step");
  }
  return static_cast<int>(rounded);
}

// Per-point projection geometry. pixel is the flat raster index, or -1 when
// outside the field of view, or -2 for a degenerate (zero-range) point.
struct BinnedPoint {
  std::int64_t pixel = -1;
  std::int32_t row = -1;
  std::int32_t col = -1;
  double range = 0.0;
  double elevation_rad = 0.0;
};

BinnedPoint bin_point(const Point& p, const GridSpec& spec, int rows, int cols,
                      bool wrap_azimuth) {
  BinnedPoint out;
  const double range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (range == 0.0) {
    out.pixel = -2;
    return out;
  }
  out.range = range;
  out.elevation_rad = std::atan2(p.z, std::hypot(p.x, p.y));

  const double az_deg = std::atan2(p.y, p.x) * kDegPerRad;
  const double el_deg = out.elevation_rad * kDegPerRad;
  std::int64_t col = static_cast<std::int64_t>(std::floor((az_deg - spec.az_min_deg) / spec.az_step_deg));
  const std::int64_t row = static_cast<std::int64_t>(std::floor((el_deg - spec.el_min_deg) / spec.el_step_deg));
  if (col == cols && wrap_azimuth) col = 0;  // +180 degrees lands in column 0
  if (col < 0 || col >= cols || row < 0 || row >= rows) return out;
  out.row = static_cast<std::int32_t>(row);
  out.col = static_cast<std::int32_t>(col);
  out.pixel = row * cols + col;
  return out;
}

// Total survivor order: smaller key wins a pixel. Index last makes the order
// strict, so the reduction result is independent of evaluation order.
bool beats(const PointCloud& cloud, const std::vector<double>& ranges, ConflictRule rule,
           std::int64_t a, std::int64_t b) {
  if (rule == ConflictRule::kKeyTimeThenMinRange) {
    const double ta = std::abs(cloud.points[a].t_rel);
    const double tb = std::abs(cloud.points[b].t_rel);
    if (ta != tb) return ta < tb;
  }
  if (ranges[a] != ranges[b]) return ranges[a] < ranges[b];
  return a < b;
}

RangeImage make_empty_image(const PointCloud& cloud, const GridSpec& spec) {
  validate(spec);
  RangeImage img;
  img.spec = spec;
  img.rows = spec.rows();
  img.cols = spec.cols();
  const std::size_t npix = img.pixel_count();
  img.range.assign(npix, 0.0);
  img.height.assign(npix, 0.0);
  img.elevation.assign(npix, 0.0);
  img.reflectance.assign(npix, 0.0);
  img.mask.assign(npix, 0.0);
  img.point_to_pixel.assign(cloud.size(), PointPixel{});
  img.pixel_to_point.assign(npix, -1);
  return img;
}

void fill_channels_from_winner(RangeImage& img, const PointCloud& cloud,
                               const std::vector<double>& ranges,
                               const std::vector<double>& elevations, std::size_t pixel) {
  const std::int64_t w = img.pixel_to_point[pixel];
  if (w < 0) return;
  const Point& p = cloud.points[w];
  img.range[pixel] = ranges[w];
  img.height[pixel] = p.z;
  img.elevation[pixel] = elevations[w];
  img.reflectance[pixel] = p.intensity;
  img.mask[pixel] = 1.0;
}

}  // namespace

int GridSpec::cols() const { return span_bins(az_min_deg, az_max_deg, az_step_deg, "azimuth"); }

int GridSpec::rows() const { return span_bins(el_min_deg, el_max_deg, el_step_deg, "elevation"); }

bool GridSpec::full_circle() const { return std::abs((az_max_deg - az_min_deg) - 360.0) <= 1e-9; }

GridSpec GridSpec::refined(int n) const {
  if (n < 1) throw std::invalid_argument("grid: refinement multiple must be >= 1");
  GridSpec out = *this;
  out.az_step_deg = az_step_deg / n;
  out.el_step_deg = el_step_deg / n;
  return out;
}

void validate(const GridSpec& spec) {
  span_bins(spec.az_min_deg, spec.az_max_deg, spec.az_step_deg, "azimuth");
  span_bins(spec.el_min_deg, spec.el_max_deg, spec.el_step_deg, "elevation");
}

SphericalCoords spherical_of(const Point& p) {
  const double range = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  if (range == 0.0) throw std::domain_error("spherical_of: degenerate point at the sensor origin");
  SphericalCoords out;
  out.range_m = range;
  out.azimuth_deg = std::atan2(p.y, p.x) * kDegPerRad;
  out.elevation_deg = std::atan2(p.z, std::hypot(p.x, p.y)) * kDegPerRad;
  return out;
}

std::int64_t RangeImage::occupied_count() const {
  std::int64_t count = 0;
  for (double m : mask) count += (m != 0.0) ? 1 : 0;
  return count;
}

RangeImage project(const PointCloud& cloud, const GridSpec& spec, ConflictRule rule) {
  RangeImage img = make_empty_image(cloud, spec);
  const std::int64_t n = static_cast<std::int64_t>(cloud.size());
  const bool wrap = img.spec.full_circle();

  std::vector<std::int64_t> pixel_of(n);
  std::vector<double> ranges(n), elevations(n);
  std::vector<std::int32_t> prow(n), pcol(n);

#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    const BinnedPoint b = bin_point(cloud.points[i], img.spec, img.rows, img.cols, wrap);
    pixel_of[i] = b.pixel;
    ranges[i] = b.range;
    elevations[i] = b.elevation_rad;
    prow[i] = b.row;
    pcol[i] = b.col;
  }

  // Winner selection is a min-reduction under a strict total order; the
  // sequential pass keeps it trivially deterministic and is O(n) cheap next
  // to the trigonometry above.
  for (std::int64_t i = 0; i < n; ++i) {
    if (pixel_of[i] < 0) continue;
    std::int64_t& w = img.pixel_to_point[pixel_of[i]];
    if (w < 0 || beats(cloud, ranges, rule, i, w)) w = i;
  }

#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    PointPixel& pp = img.point_to_pixel[i];
    if (pixel_of[i] == -2) {
      pp.status = PointStatus::kDegenerate;
    } else if (pixel_of[i] == -1) {
      pp.status = PointStatus::kOutOfFov;
    } else if (img.pixel_to_point[pixel_of[i]] == i) {
      pp.status = PointStatus::kSurvived;
      pp.row = prow[i];
      pp.col = pcol[i];
    } else {
      pp.status = PointStatus::kConflictDiscarded;
    }
  }

  const std::int64_t npix = static_cast<std::int64_t>(img.pixel_count());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t p = 0; p < npix; ++p) {
    fill_channels_from_winner(img, cloud, ranges, elevations, p);
  }
  return img;
}

RangeImage project_serial(const PointCloud& cloud, const GridSpec& spec, ConflictRule rule) {
  RangeImage img = make_empty_image(cloud, spec);
  const std::int64_t n = static_cast<std::int64_t>(cloud.size());
  const bool wrap = img.spec.full_circle();

  std::vector<std::int64_t> pixel_of(n);
  std::vector<double> ranges(n), elevations(n);

  for (std::int64_t i = 0; i < n; ++i) {
    const BinnedPoint b = bin_point(cloud.points[i], img.spec, img.rows, img.cols, wrap);
    pixel_of[i] = b.pixel;
    ranges[i] = b.range;
    elevations[i] = b.elevation_rad;
    PointPixel& pp = img.point_to_pixel[i];
    if (b.pixel == -2) {
      pp.status = PointStatus::kDegenerate;
      continue;
    }
    if (b.pixel == -1) {
      pp.status = PointStatus::kOutOfFov;
      continue;
    }
    pp.status = PointStatus::kSurvived;
    pp.row = b.row;
    pp.col = b.col;
    std::int64_t& w = img.pixel_to_point[b.pixel];
    if (w < 0 || beats(cloud, ranges, rule, i, w)) w = i;
  }

  // Demote every candidate that lost its pixel.
  for (std::int64_t i = 0; i < n; ++i) {
    PointPixel& pp = img.point_to_pixel[i];
    if (pp.status == PointStatus::kSurvived && img.pixel_to_point[pixel_of[i]] != i) {
      pp = PointPixel{-1, -1, PointStatus::kConflictDiscarded};
    }
  }

  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    fill_channels_from_winner(img, cloud, ranges, elevations, p);
  }
  return img;
}

double occupancy_rate(const RangeImage& img) {
  if (img.pixel_count() == 0) return 0.0;
  return static_cast<double>(img.occupied_count()) / static_cast<double>(img.pixel_count());
}

Point unproject_pixel(const RangeImage& img, int row, int col) {
  if (row < 0 || row >= img.rows || col < 0 || col >= img.cols) {
    throw std::out_of_range("unproject_pixel: pixel outside the raster");
  }
  const std::size_t p = img.at(row, col);
  if (img.mask[p] == 0.0) throw std::out_of_range("unproject_pixel: empty pixel");
  const double r = img.range[p];
  const double phi = img.elevation[p];
  const double az_center_rad = (img.spec.az_min_deg + (col + 0.5) * img.spec.az_step_deg) / kDegPerRad;
  Point out;
  out.x = r * std::cos(phi) * std::cos(az_center_rad);
  out.y = r * std::cos(phi) * std::sin(az_center_rad);
  out.z = r * std::sin(phi);
  out.intensity = img.reflectance[p];
  return out;
}

const std::vector<double>& channel_values(const RangeImage& img, Channel ch) {
  switch (ch) {
    case Channel::kRange: return img.range;
    case Channel::kHeight: return img.height;
    case Channel::kElevation: return img.elevation;
    case Channel::kReflectance: return img.reflectance;
    case Channel::kMask: return img.mask;
  }
  throw std::invalid_argument("channel_values: unknown channel");
}

std::vector<std::uint8_t> render_channel(const RangeImage& img, Channel ch,
                                         std::optional<std::pair<double, double>> out_range) {
  const std::vector<double>& values = channel_values(img, ch);
  std::vector<std::uint8_t> out(img.pixel_count(), 0);

  double lo = 0.0, hi = 0.0;
  if (out_range) {
    lo = out_range->first;
    hi = out_range->second;
  } else {
    bool any = false;
    for (std::size_t p = 0; p < values.size(); ++p) {
      if (img.mask[p] == 0.0) continue;
      if (!any) {
        lo = hi = values[p];
        any = true;
      } else {
        lo = std::min(lo, values[p]);
        hi = std::max(hi, values[p]);
      }
    }
    if (!any) return out;
  }

  for (std::size_t p = 0; p < values.size(); ++p) {
    if (img.mask[p] == 0.0) continue;
    if (hi == lo) {
      out[p] = 255;
      continue;
    }
    const double scaled = std::round(255.0 * (values[p] - lo) / (hi - lo));
    out[p] = static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
  }
  return out;
}

}  // namespace lidarprep
