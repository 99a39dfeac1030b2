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

#include "lidarprep/augment.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "lidarprep/bev_nms.hpp"
#include "lidarprep/parallel.hpp"

namespace lidarprep {

namespace {

bool per_point_rings(const PointCloud& cloud) { return cloud.rings.size() == cloud.points.size(); }

// Sample restored at its original pose, then rotated about the sensor z-axis.
std::pair<PointCloud, OrientedBox> pose_sample(const GtSample& sample, double yaw_delta,
                                               double z_offset) {
  RigidTransform pose = RigidTransform::yaw_about_z(sample.box.yaw);
  pose.translation[0] = sample.box.cx;
  pose.translation[1] = sample.box.cy;
  pose.translation[2] = sample.box.cz + z_offset;
  const RigidTransform placed = compose(RigidTransform::yaw_about_z(yaw_delta), pose);

  PointCloud points = apply_transform(sample.points, placed);

  OrientedBox box = sample.box;
  const double c = std::cos(yaw_delta);
  const double s = std::sin(yaw_delta);
  box.cx = c * sample.box.cx - s * sample.box.cy;
  box.cy = s * sample.box.cx + c * sample.box.cy;
  box.cz = sample.box.cz + z_offset;
  box.yaw = normalize_yaw(sample.box.yaw + yaw_delta);
  box.num_points = static_cast<std::int64_t>(sample.points.size());
  return {std::move(points), box};
}

void append_points(PointCloud& dst, const PointCloud& src) {
  const bool keep_rings = per_point_rings(dst) && per_point_rings(src);
  dst.points.insert(dst.points.end(), src.points.begin(), src.points.end());
  if (keep_rings) {
    dst.rings.insert(dst.rings.end(), src.rings.begin(), src.rings.end());
  } else {
    dst.rings.clear();
  }
}

}  // namespace

bool is_valid(const GtSample& sample, double tol) {
  if (!is_valid(sample.box)) return false;
  for (const Point& p : sample.points.points) {
    if (std::abs(p.x) > sample.box.l / 2 + tol || std::abs(p.y) > sample.box.w / 2 + tol ||
        std::abs(p.z) > sample.box.h / 2 + tol) {
      return false;
    }
  }
  return true;
}

void validate(const AugmentConfig& cfg) {
  if (cfg.paste_rotation_max < 0.0 || cfg.global_translation < 0.0 || cfg.global_rotation < 0.0) {
    throw std::invalid_argument("augment: transform ranges must be non-negative");
  }
  if (!(cfg.global_scale_min > 0.0) || cfg.global_scale_min > cfg.global_scale_max) {
    throw std::invalid_argument("augment: scale range must be positive and ordered");
  }
  if (cfg.min_projected_points < 0) {
    throw std::invalid_argument("augment: projected-point threshold must be non-negative");
  }
}

std::vector<GtSample> crop_instances(const PointCloud& frame,
                                     const std::vector<OrientedBox>& boxes) {
  const bool ringed = per_point_rings(frame);
  std::vector<GtSample> samples;
  samples.reserve(boxes.size());
  for (const OrientedBox& box : boxes) {
    GtSample sample;
    sample.box = box;
    sample.category = box.category;
    sample.source_frame = frame.frame_id;
    sample.points.frame_id = frame.frame_id;
    for (std::size_t i = 0; i < frame.points.size(); ++i) {
      const Point& p = frame.points[i];
      if (!point_in_box(box, p)) continue;
      sample.points.points.push_back(box_local_coords(box, p));
      if (ringed) sample.points.rings.push_back(frame.rings[i]);
    }
    sample.box.num_points = static_cast<std::int64_t>(sample.points.size());
    samples.push_back(std::move(sample));
  }
  return samples;
}

std::pair<PointCloud, OrientedBox> paste_sample(const PointCloud& frame, const GtSample& sample,
                                                double placement_yaw_delta, double max_delta,
                                                double z_offset) {
  if (std::abs(placement_yaw_delta) > max_delta) {
    throw std::invalid_argument("augment: placement rotation exceeds the configured maximum");
  }
  auto [points, box] = pose_sample(sample, placement_yaw_delta, z_offset);
  PointCloud out = frame;
  append_points(out, points);
  return {std::move(out), box};
}

GlobalTransformDraw draw_global_transform(const AugmentConfig& cfg, SplitRng& rng) {
  GlobalTransformDraw draw;
  draw.tx = rng.uniform(-cfg.global_translation, cfg.global_translation);
  draw.ty = rng.uniform(-cfg.global_translation, cfg.global_translation);
  draw.rotation = rng.uniform(-cfg.global_rotation, cfg.global_rotation);
  draw.scale = rng.uniform(cfg.global_scale_min, cfg.global_scale_max);
  return draw;
}

void apply_global_transform(PointCloud& frame, std::vector<OrientedBox>& boxes,
                            const GlobalTransformDraw& draw) {
  const double c = std::cos(draw.rotation);
  const double s = std::sin(draw.rotation);
  const std::int64_t n = static_cast<std::int64_t>(frame.points.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    Point& p = frame.points[i];
    const double x = draw.scale * p.x;
    const double y = draw.scale * p.y;
    p.x = c * x - s * y + draw.tx;
    p.y = s * x + c * y + draw.ty;
    p.z = draw.scale * p.z;
  }
  for (OrientedBox& box : boxes) {
    const double x = draw.scale * box.cx;
    const double y = draw.scale * box.cy;
    box.cx = c * x - s * y + draw.tx;
    box.cy = s * x + c * y + draw.ty;
    box.cz = draw.scale * box.cz;
    box.l *= draw.scale;
    box.w *= draw.scale;
    box.h *= draw.scale;
    box.yaw = normalize_yaw(box.yaw + draw.rotation);
  }
}

GlobalTransformDraw global_augment(PointCloud& frame, std::vector<OrientedBox>& boxes,
                                   const AugmentConfig& cfg, SplitRng& rng) {
  validate(cfg);
  const GlobalTransformDraw draw = draw_global_transform(cfg, rng);
  apply_global_transform(frame, boxes, draw);
  return draw;
}

std::vector<std::size_t> visibility_filter(const PointCloud& frame,
                                           const std::vector<OrientedBox>& boxes,
                                           const GridSpec& spec, int min_projected_points) {
  const RangeImage img = project(frame, spec, ConflictRule::kMinRange);
  const std::int64_t nboxes = static_cast<std::int64_t>(boxes.size());
  std::vector<std::int64_t> counts(boxes.size(), 0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t b = 0; b < nboxes; ++b) {
    std::int64_t count = 0;
    for (std::size_t i = 0; i < frame.points.size(); ++i) {
      if (img.point_to_pixel[i].survived() && point_in_box(boxes[b], frame.points[i])) ++count;
    }
    counts[b] = count;
  }
  std::vector<std::size_t> kept;
  for (std::size_t b = 0; b < boxes.size(); ++b) {
    if (counts[b] >= min_projected_points) kept.push_back(b);
  }
  return kept;
}

AugmentResult augment_frame(const PointCloud& frame, const std::vector<OrientedBox>& boxes,
                            const std::vector<GtSample>& samples, std::size_t paste_count,
                            const AugmentConfig& cfg, const GridSpec& spec) {
  validate(cfg);
  SplitRng rng(cfg.rng_seed);

  AugmentResult result;
  result.draw = draw_global_transform(cfg, rng);

  // Selection without replacement on a child stream keeps the main draw
  // sequence independent of the database size.
  SplitRng selector = rng.split(0);
  const std::size_t want = std::min(paste_count, samples.size());
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t j = 0; j < want; ++j) {
    const std::size_t k = j + static_cast<std::size_t>(selector.uniform_index(
                                  static_cast<std::uint64_t>(order.size() - j)));
    std::swap(order[j], order[k]);
  }

  result.cloud = frame;
  std::vector<OrientedBox> all_boxes = boxes;
  for (std::size_t j = 0; j < want; ++j) {
    const GtSample& sample = samples[order[j]];
    const double delta = rng.uniform(-cfg.paste_rotation_max, cfg.paste_rotation_max);
    auto [points, box] = pose_sample(sample, delta, cfg.paste_z_offset);
    bool collides = false;
    for (const OrientedBox& existing : all_boxes) {
      if (bev_iou(box, existing) > 0.0) {
        collides = true;
        break;
      }
    }
    if (collides) {
      ++result.rejected_collisions;
      continue;
    }
    append_points(result.cloud, points);
    all_boxes.push_back(box);
    result.pasted_samples.push_back(order[j]);
  }

  apply_global_transform(result.cloud, all_boxes, result.draw);

  const std::vector<std::size_t> kept =
      visibility_filter(result.cloud, all_boxes, spec, cfg.min_projected_points);
  result.removed_by_visibility = all_boxes.size() - kept.size();
  result.boxes.reserve(kept.size());
  for (std::size_t b : kept) result.boxes.push_back(all_boxes[b]);
  return result;
}

}  // namespace lidarprep
