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

#include "lidarprep/bev_nms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lidarprep {

namespace {

constexpr double kDegenerateArea = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

std::vector<Vec2> box_polygon(const OrientedBox& b) {
  const auto corners = box_bev_corners(b);
  std::vector<Vec2> poly(4);
  for (int i = 0; i < 4; ++i) poly[i] = {corners[i][0], corners[i][1]};
  return poly;
}

double polygon_area(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    twice += a.x * b.y - b.x * a.y;
  }
  return 0.5 * std::abs(twice);
}

// Keeps the part of poly on the left of the directed edge (a, b); edges of a
// counter-clockwise clip polygon have their interior on the left.
std::vector<Vec2> clip_against_edge(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b) {
  std::vector<Vec2> out;
  out.reserve(poly.size() + 1);
  const double ex = b.x - a.x;
  const double ey = b.y - a.y;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % poly.size()];
    const double cur_side = ex * (cur.y - a.y) - ey * (cur.x - a.x);
    const double nxt_side = ex * (nxt.y - a.y) - ey * (nxt.x - a.x);
    if (cur_side >= 0.0) out.push_back(cur);
    if ((cur_side >= 0.0) != (nxt_side >= 0.0)) {
      const double t = cur_side / (cur_side - nxt_side);
      out.push_back({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
    }
  }
  return out;
}

double intersection_area(const OrientedBox& a, const OrientedBox& b) {
  std::vector<Vec2> poly = box_polygon(a);
  const std::vector<Vec2> clip = box_polygon(b);
  for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i) {
    poly = clip_against_edge(poly, clip[i], clip[(i + 1) % clip.size()]);
  }
  const double area = polygon_area(poly);
  return area < kDegenerateArea ? 0.0 : area;
}

}  // namespace

void validate(const NmsConfig& cfg) {
  if (cfg.iou_threshold < 0.0 || cfg.iou_threshold > 1.0) {
    throw std::invalid_argument("nms: threshold must lie in [0, 1]");
  }
  if (cfg.max_output < 1) throw std::invalid_argument("nms: output cap must be at least 1");
}

double bev_iou(const OrientedBox& a, const OrientedBox& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  const double unite = a.l * a.w + b.l * b.w - inter;
  if (unite <= 0.0) return 0.0;
  return std::clamp(inter / unite, 0.0, 1.0);
}

std::vector<std::size_t> nms(const std::vector<OrientedBox>& boxes, const NmsConfig& cfg) {
  validate(cfg);
  for (const OrientedBox& box : boxes) {
    if (!std::isfinite(box.score)) throw std::invalid_argument("nms: scores must be finite");
  }

  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&boxes](std::size_t a, std::size_t b) {
    if (boxes[a].score != boxes[b].score) return boxes[a].score > boxes[b].score;
    return a < b;
  });

  std::vector<std::size_t> kept;
  for (std::size_t candidate : order) {
    if (kept.size() >= cfg.max_output) break;
    bool suppressed = false;
    for (std::size_t keeper : kept) {
      if (cfg.per_category && boxes[keeper].category != boxes[candidate].category) continue;
      if (bev_iou(boxes[keeper], boxes[candidate]) > cfg.iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(candidate);
  }
  return kept;
}

}  // namespace lidarprep
