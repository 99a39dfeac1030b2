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

#ifndef LIDARPREP_TEMPORAL_HPP_
#define LIDARPREP_TEMPORAL_HPP_

#include <string>
#include <vector>

#include "lidarprep/geometry.hpp"
#include "lidarprep/range_image.hpp"

namespace lidarprep {

struct SweepFrame {
  PointCloud cloud;
  RigidTransform pose_to_key = RigidTransform::identity();
  double timestamp = 0.0;
};

// Ordered set of consecutive sweeps around one key frame. Timestamps must be
// strictly increasing and the key frame's pose must be the identity.
struct SweepSet {
  std::vector<SweepFrame> frames;
  std::size_t key_index = 0;

  double key_timestamp() const { return frames[key_index].timestamp; }
};

void validate(const SweepSet& sweeps);

// Concatenates all frames in key-frame coordinates, frame order then in-frame
// order. Every point's t_rel is rewritten to its frame's timestamp minus the
// key timestamp (negative for earlier frames).
PointCloud align_frames(const SweepSet& sweeps);

// One range image per frame, each projected in its own sensor pose at the
// given single-frame resolution. Output order matches frame order.
std::vector<RangeImage> temporal_fuse(const SweepSet& sweeps, const GridSpec& spec);

// Single range image of the aligned cloud on the n-times refined grid. Pixel
// conflicts prefer the point closest in time to the key frame, then the
// closer one, then the lower index.
RangeImage spatial_fuse(const SweepSet& sweeps, const GridSpec& spec, int n);

// Same projection applied to an already aligned cloud.
RangeImage spatial_fuse_aligned(const PointCloud& aligned, const GridSpec& spec, int n);

struct OccupancyRow {
  int n = 1;
  double tau = 0.0;
};

// Occupancy rate of the spatially fused image for each resolution multiple.
std::vector<OccupancyRow> occupancy_report(const SweepSet& sweeps, const GridSpec& spec,
                                           const std::vector<int>& n_list);

std::string format_occupancy_table(const std::vector<OccupancyRow>& rows);

}  // namespace lidarprep

#endif  // LIDARPREP_TEMPORAL_HPP_
