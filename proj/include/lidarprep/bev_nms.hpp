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

#ifndef LIDARPREP_BEV_NMS_HPP_
#define LIDARPREP_BEV_NMS_HPP_

#include <cstddef>
#include <vector>

#include "lidarprep/geometry.hpp"

namespace lidarprep {

struct NmsConfig {
  double iou_threshold = 0.2;
  std::size_t max_output = 100;
  bool per_category = false;  // class-agnostic by default
};

void validate(const NmsConfig& cfg);

// Intersection over union of the two boxes' rotated footprints on the ground
// plane; z extents are ignored. Intersections below 1e-12 in area count as
// disjoint.
double bev_iou(const OrientedBox& a, const OrientedBox& b);

// Greedy suppression: repeatedly keep the highest-scoring remaining box and
// drop every box overlapping it above the threshold, stopping after
// cfg.max_output. Score ties keep the lower input index. With per_category
// set, boxes only suppress others of the same category. Returns kept input
// indices in score-descending order.
std::vector<std::size_t> nms(const std::vector<OrientedBox>& boxes, const NmsConfig& cfg = {});

}  // namespace lidarprep

#endif  // LIDARPREP_BEV_NMS_HPP_
