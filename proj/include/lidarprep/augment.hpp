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

#ifndef LIDARPREP_AUGMENT_HPP_
#define LIDARPREP_AUGMENT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "lidarprep/geometry.hpp"
#include "lidarprep/range_image.hpp"
#include "lidarprep/rng.hpp"

namespace lidarprep {

// One cropped ground-truth instance. The box keeps its original pose in the
// source frame; the points are stored in box-local coordinates (box center at
// the origin, yaw zeroed) so the instance can be re-posed anywhere.
struct GtSample {
  OrientedBox box;
  PointCloud points;
  std::string category;
  std::string source_frame;
};

// Every local point must fall inside the half-open box extents.
bool is_valid(const GtSample& sample, double tol = 1e-6);

struct AugmentConfig {
  double paste_rotation_max = kPi / 4;
  double global_translation = 0.2;
  double global_rotation = kPi / 4;
  double global_scale_min = 0.95;
  double global_scale_max = 1.05;
  double paste_z_offset = 0.0;
  int min_projected_points = 3;
  std::uint64_t rng_seed = 0;
};

void validate(const AugmentConfig& cfg);

// Extracts the points inside each box, expressed in box-local coordinates.
// Sample order matches box order; num_points is recorded on each sample box.
std::vector<GtSample> crop_instances(const PointCloud& frame,
                                     const std::vector<OrientedBox>& boxes);

// Restores the sample at its original pose, rotates it rigidly about the
// sensor z-axis by placement_yaw_delta, and appends its points to the frame.
// The box center's distance to the origin is preserved. Throws when |delta|
// exceeds max_delta.
std::pair<PointCloud, OrientedBox> paste_sample(const PointCloud& frame, const GtSample& sample,
                                                double placement_yaw_delta,
                                                double max_delta = kPi / 4,
                                                double z_offset = 0.0);

struct GlobalTransformDraw {
  double tx = 0.0;
  double ty = 0.0;
  double rotation = 0.0;
  double scale = 1.0;
};

// Consumes exactly four draws in the order tx, ty, rotation, scale.
GlobalTransformDraw draw_global_transform(const AugmentConfig& cfg, SplitRng& rng);

// Applies scale, then rotation about z, then x/y translation to the points
// and boxes in place. Box extents scale; yaw shifts by the rotation.
void apply_global_transform(PointCloud& frame, std::vector<OrientedBox>& boxes,
                            const GlobalTransformDraw& draw);

GlobalTransformDraw global_augment(PointCloud& frame, std::vector<OrientedBox>& boxes,
                                   const AugmentConfig& cfg, SplitRng& rng);

// Projects the frame and keeps the boxes whose surviving member points number
// at least min_projected_points.
std::vector<std::size_t> visibility_filter(const PointCloud& frame,
                                           const std::vector<OrientedBox>& boxes,
                                           const GridSpec& spec, int min_projected_points = 3);

struct AugmentResult {
  PointCloud cloud;
  std::vector<OrientedBox> boxes;
  GlobalTransformDraw draw;
  std::vector<std::size_t> pasted_samples;  // database indices that were accepted
  std::size_t rejected_collisions = 0;
  std::size_t removed_by_visibility = 0;
};

// Full augmentation chain, deterministic under cfg.rng_seed:
//   1. the main stream draws tx, ty, rotation, scale, then one placement yaw
//      delta per attempted paste, in paste order;
//   2. paste_count database samples are chosen without replacement on a split
//      child stream (label 0), so the selection does not disturb the main
//      sequence;
//   3. a pasted sample whose box overlaps any existing or already accepted
//      box in BEV is rejected;
//   4. the global transform is applied to the assembled scene;
//   5. boxes that keep fewer than cfg.min_projected_points surviving points
//      on the projected image are dropped.
AugmentResult augment_frame(const PointCloud& frame, const std::vector<OrientedBox>& boxes,
                            const std::vector<GtSample>& samples, std::size_t paste_count,
                            const AugmentConfig& cfg, const GridSpec& spec = GridSpec{});

}  // namespace lidarprep

#endif  // LIDARPREP_AUGMENT_HPP_
