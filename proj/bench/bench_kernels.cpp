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

// Compares the parallel kernels against their serial reference
// implementations on a synthetic cloud and reports wall times per thread
// count. The parallel results are checked against the serial ones on every
// run, so this doubles as a large-input equivalence smoke test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lidarprep/fusion.hpp"
#include "lidarprep/parallel.hpp"
#include "lidarprep/range_image.hpp"
#include "lidarprep/rng.hpp"
#include "lidarprep/semantic.hpp"
#include "lidarprep/voxel.hpp"

namespace {

using Clock = std::chrono::steady_clock;

lidarprep::PointCloud synthetic_cloud(std::size_t count, std::uint64_t seed) {
  lidarprep::SplitRng rng(seed);
  lidarprep::PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    lidarprep::Point p;
    const double range = rng.uniform(1.0, 60.0);
    const double az = rng.uniform(-lidarprep::kPi, lidarprep::kPi);
    const double el = rng.uniform(-0.5, 0.17);
    p.x = range * std::cos(el) * std::cos(az);
    p.y = range * std::cos(el) * std::sin(az);
    p.z = range * std::sin(el);
    p.intensity = rng.uniform(0.0, 1.0);
    cloud.points.push_back(p);
  }
  return cloud;
}

template <typename F>
double time_ms(F&& fn) {
  const auto start = Clock::now();
  fn();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count();
}

bool images_equal(const lidarprep::RangeImage& a, const lidarprep::RangeImage& b) {
  return a.range == b.range && a.height == b.height && a.elevation == b.elevation &&
         a.reflectance == b.reflectance && a.mask == b.mask &&
         a.pixel_to_point == b.pixel_to_point;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t count = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 300000;
  const lidarprep::PointCloud cloud = synthetic_cloud(count, 20260822);
  const lidarprep::GridSpec grid;
  const lidarprep::VoxelSpec voxels = lidarprep::VoxelSpec::voxels(0.1);

  std::printf("cloud: %zu points, grid %dx%d\n\n", cloud.size(), grid.rows(), grid.cols());

  const lidarprep::RangeImage ref_img = lidarprep::project_serial(cloud, grid);
  const lidarprep::FeatureMap ref_map = lidarprep::extract_reference_features_serial(ref_img, 16);
  const lidarprep::VoxelGrid ref_grid = lidarprep::build_grid_serial(cloud, voxels);

  const double serial_project = time_ms([&] { (void)lidarprep::project_serial(cloud, grid); });
  const double serial_features =
      time_ms([&] { (void)lidarprep::extract_reference_features_serial(ref_img, 16); });
  const double serial_grid = time_ms([&] { (void)lidarprep::build_grid_serial(cloud, voxels); });
  std::printf("%-28s %10.2f ms\n", "project (serial)", serial_project);
  std::printf("%-28s %10.2f ms\n", "features (serial)", serial_features);
  std::printf("%-28s %10.2f ms\n\n", "build_grid (serial)", serial_grid);

  bool all_match = true;
  for (int threads : {1, 2, 4, 8}) {
    lidarprep::par::set_thread_count(threads);

    lidarprep::RangeImage img;
    const double t_project = time_ms([&] { img = lidarprep::project(cloud, grid); });
    lidarprep::FeatureMap fmap;
    const double t_features =
        time_ms([&] { fmap = lidarprep::extract_reference_features(ref_img, 16); });
    lidarprep::VoxelGrid vgrid;
    const double t_grid = time_ms([&] { vgrid = lidarprep::build_grid(cloud, voxels); });

    const bool match = images_equal(img, ref_img) && fmap.values == ref_map.values &&
                       vgrid.coords == ref_grid.coords && vgrid.cell_points == ref_grid.cell_points;
    all_match = all_match && match;
    std::printf("threads=%d\n", threads);
    std::printf("  %-26s %10.2f ms  (x%.2f)\n", "project", t_project, serial_project / t_project);
    std::printf("  %-26s %10.2f ms  (x%.2f)\n", "features", t_features,
                serial_features / t_features);
    std::printf("  %-26s %10.2f ms  (x%.2f)\n", "build_grid", t_grid, serial_grid / t_grid);
    std::printf("  serial equivalence: %s\n\n", match ? "ok" : "MISMATCH");
  }

  if (!all_match) {
    std::printf("FAILURE: parallel kernels diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
