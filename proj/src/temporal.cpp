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

#include "lidarprep/temporal.hpp"

#include <cstdio>
#include <stdexcept>

namespace lidarprep {

void validate(const SweepSet& sweeps) {
  if (sweeps.frames.empty()) throw std::invalid_argument("sweep: at least one frame required");
  if (sweeps.key_index >= sweeps.frames.size()) {
    throw std::invalid_argument("sweep: key index out of range");
  }
  if (!is_identity(sweeps.frames[sweeps.key_index].pose_to_key, 1e-9)) {
    throw std::invalid_argument("sweep: key frame pose must be the identity");
  }
  for (std::size_t i = 0; i < sweeps.frames.size(); ++i) {
    if (!is_valid(sweeps.frames[i].pose_to_key, 1e-9)) {
      throw std::invalid_argument("sweep: frame pose is not a rigid transform");
    }
    if (i > 0 && !(sweeps.frames[i].timestamp > sweeps.frames[i - 1].timestamp)) {
      throw std::invalid_argument("sweep: timestamps must be strictly increasing");
    }
  }
}

PointCloud align_frames(const SweepSet& sweeps) {
  validate(sweeps);
  const double key_time = sweeps.key_timestamp();

  PointCloud out;
  out.frame_id = sweeps.frames[sweeps.key_index].cloud.frame_id;
  std::size_t total = 0;
  bool all_rings = true;
  for (const SweepFrame& frame : sweeps.frames) {
    total += frame.cloud.size();
    all_rings = all_rings && frame.cloud.rings.size() == frame.cloud.size();
  }
  out.points.reserve(total);
  if (all_rings) out.rings.reserve(total);

  for (const SweepFrame& frame : sweeps.frames) {
    const double t_rel = frame.timestamp - key_time;
    PointCloud moved = apply_transform(frame.cloud, frame.pose_to_key);
    for (Point& p : moved.points) {
      p.t_rel = t_rel;
      out.points.push_back(p);
    }
    if (all_rings) {
      out.rings.insert(out.rings.end(), frame.cloud.rings.begin(), frame.cloud.rings.end());
    }
  }
  return out;
}

std::vector<RangeImage> temporal_fuse(const SweepSet& sweeps, const GridSpec& spec) {
  validate(sweeps);
  std::vector<RangeImage> out;
  out.reserve(sweeps.frames.size());
  for (const SweepFrame& frame : sweeps.frames) {
    out.push_back(project(frame.cloud, spec, ConflictRule::kMinRange));
  }
  return out;
}

RangeImage spatial_fuse_aligned(const PointCloud& aligned, const GridSpec& spec, int n) {
  return project(aligned, spec.refined(n), ConflictRule::kKeyTimeThenMinRange);
}

RangeImage spatial_fuse(const SweepSet& sweeps, const GridSpec& spec, int n) {
  return spatial_fuse_aligned(align_frames(sweeps), spec, n);
}

std::vector<OccupancyRow> occupancy_report(const SweepSet& sweeps, const GridSpec& spec,
                                           const std::vector<int>& n_list) {
  const PointCloud aligned = align_frames(sweeps);
  std::vector<OccupancyRow> rows;
  rows.reserve(n_list.size());
  for (int n : n_list) {
    rows.push_back({n, occupancy_rate(spatial_fuse_aligned(aligned, spec, n))});
  }
  return rows;
}

std::string format_occupancy_table(const std::vector<OccupancyRow>& rows) {
  std::string out = "  n  occupancy\n";
  char line[64];
  for (const OccupancyRow& row : rows) {
    std::snprintf(line, sizeof(line), "%3d  %.6f\n", row.n, row.tau);
    out += line;
  }
  return out;
}

}  // namespace lidarprep
