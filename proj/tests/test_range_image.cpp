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

#include <cmath>
#include <cstring>
#include <map>

#include "doctest.h"
#include "lidarprep/parallel.hpp"
#include "lidarprep/rng.hpp"
#include "test_util.hpp"

namespace lidarprep {
namespace {

using testing::from_spherical;
using testing::pt;
using testing::random_cloud;

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  return a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool images_equal(const RangeImage& a, const RangeImage& b) {
  if (a.rows != b.rows || a.cols != b.cols) return false;
  if (!bits_equal(a.range, b.range) || !bits_equal(a.height, b.height) ||
      !bits_equal(a.elevation, b.elevation) || !bits_equal(a.reflectance, b.reflectance) ||
      !bits_equal(a.mask, b.mask)) {
    return false;
  }
  if (a.pixel_to_point != b.pixel_to_point) return false;
  if (a.point_to_pixel.size() != b.point_to_pixel.size()) return false;
  for (std::size_t i = 0; i < a.point_to_pixel.size(); ++i) {
    if (a.point_to_pixel[i].row != b.point_to_pixel[i].row ||
        a.point_to_pixel[i].col != b.point_to_pixel[i].col ||
        a.point_to_pixel[i].status != b.point_to_pixel[i].status) {
      return false;
    }
  }
  return true;
}

TEST_CASE("default grid is 32 rows by 1152 columns") {
  GridSpec spec;
  CHECK(spec.rows() == 32);
  CHECK(spec.cols() == 1152);
  CHECK(spec.full_circle());
  const GridSpec fine = spec.refined(2);
  CHECK(fine.rows() == 64);
  CHECK(fine.cols() == 2304);
  CHECK(fine.full_circle());
}

TEST_CASE("grid validation rejects bad steps") {
  GridSpec spec;
  spec.az_step_deg = 0.7;  // 360 / 0.7 is not an integer
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = GridSpec{};
  spec.el_step_deg = 0.0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = GridSpec{};
  spec.az_max_deg = spec.az_min_deg;  // empty span
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec{}.refined(0), std::invalid_argument);
}

TEST_CASE("a point straight ahead lands in the documented pixel") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 0, 0.5));
  const RangeImage img = project(cloud, GridSpec{});
  REQUIRE(img.point_to_pixel[0].survived());
  CHECK(img.point_to_pixel[0].row == 24);
  CHECK(img.point_to_pixel[0].col == 576);
  const std::size_t p = img.at(24, 576);
  CHECK(img.range[p] == 10.0);
  CHECK(img.height[p] == 0.0);
  CHECK(img.elevation[p] == 0.0);
  CHECK(img.reflectance[p] == 0.5);
  CHECK(img.mask[p] == 1.0);
  CHECK(img.pixel_to_point[p] == 0);
  CHECK(img.occupied_count() == 1);
  CHECK(occupancy_rate(img) == 2.712673611111111e-05);  // 1 / 36864
}

TEST_CASE("channel values carry the winning point") {
  PointCloud cloud;
  cloud.points.push_back(pt(3, 4, -2, 0.8));
  const RangeImage img = project(cloud, GridSpec{});
  REQUIRE(img.point_to_pixel[0].survived());
  const std::size_t p = img.at(img.point_to_pixel[0].row, img.point_to_pixel[0].col);
  CHECK(img.range[p] == doctest::Approx(std::sqrt(29.0)).epsilon(1e-15));
  CHECK(img.height[p] == -2.0);
  CHECK(img.elevation[p] == doctest::Approx(std::atan2(-2.0, 5.0)).epsilon(1e-15));
  CHECK(img.reflectance[p] == doctest::Approx(0.8f));
}

TEST_CASE("an azimuth of exactly +180 degrees wraps to column 0") {
  PointCloud cloud;
  cloud.points.push_back(pt(-5, 0.0, 0));   // atan2(+0, -5) = +pi
  cloud.points.push_back(pt(-6, -0.0, 0));  // atan2(-0, -6) = -pi
  const RangeImage img = project(cloud, GridSpec{});
  REQUIRE(img.point_to_pixel[0].survived());
  CHECK(img.point_to_pixel[0].col == 0);
  CHECK(img.point_to_pixel[0].row == 24);
  // Both seam points share the column, so the closer one wins the pixel.
  CHECK(img.point_to_pixel[1].status == PointStatus::kConflictDiscarded);
}

TEST_CASE("the seam does not wrap on a partial panorama") {
  GridSpec spec;
  spec.az_min_deg = -90.0;
  spec.az_max_deg = 90.0;
  CHECK(spec.cols() == 576);
  CHECK(!spec.full_circle());
  PointCloud cloud;
  cloud.points.push_back(pt(0, 5, 0));  // azimuth exactly +90
  const RangeImage img = project(cloud, spec);
  CHECK(img.point_to_pixel[0].status == PointStatus::kOutOfFov);
  CHECK(img.occupied_count() == 0);
}

TEST_CASE("closest point wins a contested pixel") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 0, 0.1));
  cloud.points.push_back(pt(5, 0, 0, 0.9));
  const RangeImage img = project(cloud, GridSpec{});
  const std::size_t p = img.at(24, 576);
  CHECK(img.pixel_to_point[p] == 1);
  CHECK(img.range[p] == 5.0);
  CHECK(img.reflectance[p] == doctest::Approx(0.9f));
  CHECK(img.point_to_pixel[0].status == PointStatus::kConflictDiscarded);
  CHECK(img.point_to_pixel[1].survived());
  CHECK(img.occupied_count() == 1);
}

TEST_CASE("equal ranges break toward the lower index") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 0));
  cloud.points.push_back(pt(10, 0, 0));
  const RangeImage img = project(cloud, GridSpec{});
  CHECK(img.pixel_to_point[img.at(24, 576)] == 0);
  CHECK(img.point_to_pixel[0].survived());
  CHECK(img.point_to_pixel[1].status == PointStatus::kConflictDiscarded);
}

TEST_CASE("key-time priority outranks range") {
  PointCloud cloud;
  cloud.points.push_back(pt(5, 0, 0, 0, -0.45));
  cloud.points.push_back(pt(10, 0, 0, 0, 0.0));
  const RangeImage by_range = project(cloud, GridSpec{}, ConflictRule::kMinRange);
  CHECK(by_range.pixel_to_point[by_range.at(24, 576)] == 0);
  const RangeImage by_time = project(cloud, GridSpec{}, ConflictRule::kKeyTimeThenMinRange);
  CHECK(by_time.pixel_to_point[by_time.at(24, 576)] == 1);
  CHECK(by_time.range[by_time.at(24, 576)] == 10.0);
}

TEST_CASE("key-time ties fall back to range then index") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 0, 0, 0.3));
  cloud.points.push_back(pt(5, 0, 0, 0, -0.3));
  const RangeImage img = project(cloud, GridSpec{}, ConflictRule::kKeyTimeThenMinRange);
  CHECK(img.pixel_to_point[img.at(24, 576)] == 1);
}

TEST_CASE("points outside the field of view and at the origin are labeled") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 11));   // elevation ~47.7 degrees, above the band
  cloud.points.push_back(pt(10, 0, -10));  // elevation -45 degrees, below the band
  cloud.points.push_back(pt(0, 0, 0));
  const RangeImage img = project(cloud, GridSpec{});
  CHECK(img.point_to_pixel[0].status == PointStatus::kOutOfFov);
  CHECK(img.point_to_pixel[1].status == PointStatus::kOutOfFov);
  CHECK(img.point_to_pixel[2].status == PointStatus::kDegenerate);
  CHECK(img.occupied_count() == 0);
  CHECK(occupancy_rate(img) == 0.0);
}

TEST_CASE("elevation band edges are half-open") {
  PointCloud cloud;
  cloud.points.push_back(from_spherical(10.0, 0.0, -30.0 * kPi / 180.0));
  const RangeImage img = project(cloud, GridSpec{});
  REQUIRE(img.point_to_pixel[0].survived());
  CHECK(img.point_to_pixel[0].row == 0);
  // The top edge itself is excluded.
  PointCloud top;
  top.points.push_back(pt(10.0 * std::cos(10.0 * kPi / 180.0), 0,
                          10.0 * std::sin(10.0 * kPi / 180.0)));
  const RangeImage img_top = project(top, GridSpec{});
  const SphericalCoords sph = spherical_of(top.points[0]);
  if (sph.elevation_deg >= 10.0) {
    CHECK(img_top.point_to_pixel[0].status == PointStatus::kOutOfFov);
  } else {
    CHECK(img_top.point_to_pixel[0].row == 31);
  }
}

TEST_CASE("projecting an empty cloud yields an empty image") {
  const RangeImage img = project(PointCloud{}, GridSpec{});
  CHECK(img.occupied_count() == 0);
  CHECK(img.point_to_pixel.empty());
  CHECK(img.pixel_to_point.size() == img.pixel_count());
  CHECK(occupancy_rate(img) == 0.0);
}

TEST_CASE("spherical coordinates match hand values") {
  const SphericalCoords sph = spherical_of(pt(1, 1, 0));
  CHECK(sph.azimuth_deg == doctest::Approx(45.0));
  CHECK(sph.elevation_deg == doctest::Approx(0.0));
  CHECK(sph.range_m == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const SphericalCoords up = spherical_of(pt(0, 0, 5));
  CHECK(up.elevation_deg == doctest::Approx(90.0));
  CHECK_THROWS_AS(spherical_of(pt(0, 0, 0)), std::domain_error);
}

TEST_CASE("unprojection reconstructs the stored range and the bin center") {
  PointCloud cloud;
  cloud.points.push_back(pt(10, 0, 0, 0.5));
  const RangeImage img = project(cloud, GridSpec{});
  const Point back = unproject_pixel(img, 24, 576);
  CHECK(back.x == doctest::Approx(9.999962815279419).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(0.027270735760538144).epsilon(1e-12));
  CHECK(back.z == 0.0);
  CHECK(back.intensity == doctest::Approx(0.5f));
  const SphericalCoords sph = spherical_of(back);
  CHECK(sph.range_m == doctest::Approx(10.0).epsilon(1e-12));
  // Azimuth error is bounded by half a bin.
  CHECK(std::abs(sph.azimuth_deg - 0.0) <= GridSpec{}.az_step_deg / 2 + 1e-12);
}

TEST_CASE("unprojection round trip over random single-occupancy pixels") {
  SplitRng rng(2026);
  const GridSpec spec;
  const PointCloud cloud = random_cloud(rng, 400);
  const RangeImage img = project(cloud, spec);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!img.point_to_pixel[i].survived()) continue;
    const Point back = unproject_pixel(img, img.point_to_pixel[i].row, img.point_to_pixel[i].col);
    const SphericalCoords orig = spherical_of(cloud.points[i]);
    const SphericalCoords rec = spherical_of(back);
    CHECK(std::abs(rec.range_m - orig.range_m) < 1e-9);
    CHECK(std::fabs(back.z - cloud.points[i].z) <= 1e-9);
    double daz = std::abs(rec.azimuth_deg - orig.azimuth_deg);
    if (daz > 180.0) daz = 360.0 - daz;
    CHECK(daz <= spec.az_step_deg / 2 + 1e-12);
  }
}

TEST_CASE("unprojection rejects empty pixels and bad coordinates") {
  const RangeImage img = project(PointCloud{}, GridSpec{});
  CHECK_THROWS_AS(unproject_pixel(img, 0, 0), std::out_of_range);
  CHECK_THROWS_AS(unproject_pixel(img, -1, 0), std::out_of_range);
  CHECK_THROWS_AS(unproject_pixel(img, 32, 0), std::out_of_range);
  CHECK_THROWS_AS(unproject_pixel(img, 0, 1152), std::out_of_range);
}

TEST_CASE("projection matches a brute-force per-pixel minimum") {
  SplitRng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const GridSpec spec;
    const PointCloud cloud = random_cloud(rng, 1 + rng.uniform_index(200));
    const RangeImage img = project(cloud, spec);

    std::map<std::int64_t, std::int64_t> winner;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const SphericalCoords sph = spherical_of(cloud.points[i]);
      std::int64_t col =
          static_cast<std::int64_t>(std::floor((sph.azimuth_deg - spec.az_min_deg) / spec.az_step_deg));
      const std::int64_t row =
          static_cast<std::int64_t>(std::floor((sph.elevation_deg - spec.el_min_deg) / spec.el_step_deg));
      if (col == spec.cols()) col = 0;
      if (col < 0 || col >= spec.cols() || row < 0 || row >= spec.rows()) continue;
      const std::int64_t pix = row * spec.cols() + col;
      auto it = winner.find(pix);
      if (it == winner.end()) {
        winner[pix] = static_cast<std::int64_t>(i);
        continue;
      }
      const SphericalCoords cur = spherical_of(cloud.points[it->second]);
      if (sph.range_m < cur.range_m) it->second = static_cast<std::int64_t>(i);
    }

    REQUIRE(img.occupied_count() == static_cast<std::int64_t>(winner.size()));
    for (const auto& [pix, idx] : winner) {
      CHECK(img.pixel_to_point[pix] == idx);
      CHECK(img.range[pix] == spherical_of(cloud.points[idx]).range_m);
    }
  }
}

TEST_CASE("parallel projection is bit-identical to the serial reference") {
  SplitRng rng(1234);
  const PointCloud cloud = random_cloud(rng, 5000);
  for (ConflictRule rule : {ConflictRule::kMinRange, ConflictRule::kKeyTimeThenMinRange}) {
    const RangeImage reference = project_serial(cloud, GridSpec{}, rule);
    for (int threads : {1, 2, 3, 8}) {
      par::set_thread_count(threads);
      const RangeImage parallel = project(cloud, GridSpec{}, rule);
      CHECK(images_equal(reference, parallel));
    }
  }
  par::set_thread_count(1);
}

TEST_CASE("channel render normalizes over occupied pixels") {
  PointCloud cloud;
  cloud.points.push_back(pt(5, 0, 0));
  cloud.points.push_back(pt(-10, 0.0, 0));
  const RangeImage img = project(cloud, GridSpec{});
  const auto bytes = render_channel(img, Channel::kRange);
  CHECK(bytes.size() == img.pixel_count());
  CHECK(bytes[img.at(24, 576)] == 0);  // min range
  CHECK(bytes[img.at(24, 0)] == 255);  // max range
  std::size_t nonzero = 0;
  for (std::uint8_t b : bytes) nonzero += (b != 0) ? 1 : 0;
  CHECK(nonzero == 1);  // unoccupied pixels render 0, the min renders 0 too

  const auto fixed = render_channel(img, Channel::kRange, std::make_pair(0.0, 10.0));
  CHECK(fixed[img.at(24, 576)] == 128);  // round(255 * 5 / 10)
  CHECK(fixed[img.at(24, 0)] == 255);
}

TEST_CASE("channel render handles constant and empty images") {
  PointCloud cloud;
  cloud.points.push_back(pt(5, 0, 0));
  const RangeImage img = project(cloud, GridSpec{});
  const auto bytes = render_channel(img, Channel::kMask);
  CHECK(bytes[img.at(24, 576)] == 255);  // min == max renders 255

  const RangeImage empty = project(PointCloud{}, GridSpec{});
  const auto blank = render_channel(empty, Channel::kRange);
  for (std::uint8_t b : blank) CHECK(b == 0);

  const auto clamped = render_channel(img, Channel::kRange, std::make_pair(10.0, 20.0));
  CHECK(clamped[img.at(24, 576)] == 0);  // below the fixed range clamps
}

}  // namespace
}  // namespace lidarprep
