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

#include "lidarprep/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "lidarprep/augment.hpp"
#include "lidarprep/bev_nms.hpp"
#include "lidarprep/fusion.hpp"
#include "lidarprep/io.hpp"
#include "lidarprep/parallel.hpp"
#include "lidarprep/range_image.hpp"
#include "lidarprep/semantic.hpp"
#include "lidarprep/temporal.hpp"
#include "lidarprep/voxel.hpp"

namespace lidarprep {

namespace {

void add_grid_options(CLI::App* sub, GridSpec& grid) {
  sub->add_option("--az-min", grid.az_min_deg, "azimuth lower bound, degrees");
  sub->add_option("--az-max", grid.az_max_deg, "azimuth upper bound, degrees");
  sub->add_option("--az-step", grid.az_step_deg, "azimuth resolution, degrees");
  sub->add_option("--el-min", grid.el_min_deg, "elevation lower bound, degrees");
  sub->add_option("--el-max", grid.el_max_deg, "elevation upper bound, degrees");
  sub->add_option("--el-step", grid.el_step_deg, "elevation resolution, degrees");
}

Pooling parse_pooling(const std::string& name) {
  return name == "max" ? Pooling::kMax : Pooling::kAverage;
}

std::string format_rate(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return buf;
}

void render_image(const RangeImage& img, const std::string& dir) {
  const std::pair<Channel, const char*> channels[] = {{Channel::kRange, "range"},
                                                      {Channel::kHeight, "height"},
                                                      {Channel::kElevation, "elevation"},
                                                      {Channel::kReflectance, "reflectance"},
                                                      {Channel::kMask, "mask"}};
  for (const auto& [channel, name] : channels) {
    const std::vector<std::uint8_t> gray = render_channel(img, channel);
    write_pgm((std::filesystem::path(dir) / (std::string(name) + ".pgm")).string(), img.rows,
              img.cols, gray);
  }
}

struct ProjectionTally {
  std::int64_t survived = 0, out_of_fov = 0, displaced = 0, degenerate = 0;
};

ProjectionTally tally(const RangeImage& img) {
  ProjectionTally t;
  for (const PointPixel& pp : img.point_to_pixel) {
    switch (pp.status) {
      case PointStatus::kSurvived: ++t.survived; break;
      case PointStatus::kOutOfFov: ++t.out_of_fov; break;
      case PointStatus::kConflictDiscarded: ++t.displaced; break;
      case PointStatus::kDegenerate: ++t.degenerate; break;
    }
  }
  return t;
}

void run_project(const std::string& input, const std::string& output, const GridSpec& grid,
                 const std::string& render_dir, const std::string& features_path, int feature_dim,
                 std::ostream& out) {
  const PointCloud cloud = read_points(input);
  const RangeImage img = project(cloud, grid);
  write_range_image(img, output);
  if (!render_dir.empty()) render_image(img, render_dir);
  if (!features_path.empty()) {
    write_feature_map(extract_reference_features(img, feature_dim), features_path, grid);
  }
  const ProjectionTally t = tally(img);
  out << "projected " << cloud.size() << " points onto " << img.rows << "x" << img.cols << ": "
      << t.survived << " survived, " << t.out_of_fov << " out of view, " << t.displaced
      << " displaced, " << t.degenerate << " degenerate; occupancy "
      << format_rate(occupancy_rate(img)) << "\n";
}

void run_fuse(const std::string& manifest, const std::string& strategy, int n,
              const GridSpec& grid, const std::string& output, std::ostream& out) {
  const SweepSet sweeps = read_sweep_manifest(manifest);
  if (n == 0) n = (strategy == "spatial" && sweeps.frames.size() == 10) ? 2 : 1;
  if (strategy == "temporal") {
    const std::vector<RangeImage> images = temporal_fuse(sweeps, grid);
    write_range_image_batch(images, output);
    std::int64_t survived = 0;
    for (const RangeImage& img : images) survived += tally(img).survived;
    out << "fused " << images.size() << " frames into a batch; " << survived
        << " points survived\n";
  } else {
    const RangeImage img = spatial_fuse(sweeps, grid, n);
    write_range_image(img, output);
    out << "fused " << sweeps.frames.size() << " frames at n=" << n << " onto " << img.rows << "x"
        << img.cols << "; occupancy " << format_rate(occupancy_rate(img)) << "\n";
  }
}

void run_voxelize(const std::string& input, const std::string& features_path,
                  const std::string& mode, double bev_res, const std::string& pool_sem,
                  const std::string& pool_geo, bool with_time, const std::string& affine_path,
                  const std::string& output, std::ostream& out) {
  const PointCloud cloud = read_points(input);
  const VoxelSpec spec =
      mode == "pillar" ? VoxelSpec::pillars(bev_res) : VoxelSpec::voxels(bev_res);

  FeatureMatrix sem;
  sem.count = static_cast<std::int64_t>(cloud.size());
  sem.dim = 0;
  if (!features_path.empty()) {
    const FeatureMap fmap = read_feature_map(features_path);
    const GridSpec grid = read_feature_map_grid(features_path).value_or(GridSpec{});
    const RangeImage img = project(cloud, grid);
    sem = sample_point_features(fmap, img);
  }

  AffineMap affine;
  const bool use_affine = !affine_path.empty();
  if (use_affine) affine = read_affine_map(affine_path);

  const PoolingConfig cfg{parse_pooling(pool_sem), parse_pooling(pool_geo)};
  const VoxelFeatureTensor tensor =
      assemble(cloud, sem, spec, cfg, with_time, use_affine ? &affine : nullptr);
  write_voxel_tensor(tensor, output);
  out << "voxelized " << cloud.size() << " points into " << tensor.coords.size() << " "
      << (mode == "pillar" ? "pillars" : "voxels") << " (feature width " << tensor.dim() << ")\n";
}

void run_augment(const std::string& input, const std::string& boxes_path, const std::string& db,
                 const std::string& crop_db, std::size_t paste, const AugmentConfig& cfg,
                 const GridSpec& grid, const std::string& output_points,
                 const std::string& output_boxes, std::ostream& out) {
  const PointCloud frame = read_points(input);
  const std::vector<OrientedBox> boxes = read_boxes(boxes_path);

  if (!crop_db.empty()) {
    const std::vector<GtSample> samples = crop_instances(frame, boxes);
    save_gt_database(samples, crop_db);
    out << "cropped " << samples.size() << " samples into " << crop_db << "\n";
    return;
  }

  std::vector<GtSample> samples;
  if (!db.empty()) samples = load_gt_database(db);
  const AugmentResult result = augment_frame(frame, boxes, samples, paste, cfg, grid);
  write_points(result.cloud, output_points);
  write_boxes(result.boxes, output_boxes);
  out << "augmented frame: " << result.pasted_samples.size() << " samples pasted, "
      << result.rejected_collisions << " rejected by overlap, " << result.removed_by_visibility
      << " boxes removed by visibility; " << result.boxes.size() << " boxes and "
      << result.cloud.size() << " points kept\n";
}

void run_stats(const std::string& manifest, const std::vector<int>& n_list, const GridSpec& grid,
               const std::string& output, const std::string& jsonl, std::ostream& out) {
  const SweepSet sweeps = read_sweep_manifest(manifest);
  const std::vector<OccupancyRow> rows = occupancy_report(sweeps, grid, n_list);
  const std::string table = format_occupancy_table(rows);
  out << table;
  if (!output.empty()) atomic_write_file(output, table);
  if (!jsonl.empty()) {
    std::string text;
    for (const OccupancyRow& row : rows) {
      text += "{\"n\": " + std::to_string(row.n) + ", \"tau\": " + format_rate(row.tau) + "}\n";
    }
    atomic_write_file(jsonl, text);
  }
}

void run_nms(const std::string& input, const std::string& output, const NmsConfig& cfg,
             std::ostream& out) {
  const std::vector<OrientedBox> boxes = read_boxes(input);
  const std::vector<std::size_t> kept = nms(boxes, cfg);
  std::vector<OrientedBox> kept_boxes;
  kept_boxes.reserve(kept.size());
  for (std::size_t i : kept) kept_boxes.push_back(boxes[i]);
  write_boxes(kept_boxes, output);
  out << "kept " << kept.size() << " of " << boxes.size() << " boxes\n";
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LiDAR point cloud preprocessing pipeline"};
  app.name("lidarprep");
  app.require_subcommand(1);
  app.add_option_function<int>(
         "--threads", [](int n) { par::set_thread_count(n); },
         "worker threads (default: LIDARPREP_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  // project
  auto* project_cmd = app.add_subcommand("project", "project a point cloud to a range image");
  std::string pr_input, pr_output, pr_render, pr_features;
  GridSpec pr_grid;
  int pr_feature_dim = kDefaultFeatureDim;
  project_cmd->add_option("--input", pr_input, "point record file")->required();
  project_cmd->add_option("--output", pr_output, "range image tensor path")->required();
  add_grid_options(project_cmd, pr_grid);
  project_cmd->add_option("--render", pr_render, "directory for per-channel PGM renders");
  project_cmd->add_option("--features", pr_features, "also write reference features here");
  project_cmd->add_option("--feature-dim", pr_feature_dim, "reference feature width")
      ->check(CLI::Range(kMinFeatureDim, 4096));
  project_cmd->callback(
      [&] { run_project(pr_input, pr_output, pr_grid, pr_render, pr_features, pr_feature_dim, out); });

  // fuse
  auto* fuse_cmd = app.add_subcommand("fuse", "aggregate a sweep set into range images");
  std::string fu_manifest, fu_output, fu_strategy = "spatial";
  GridSpec fu_grid;
  int fu_n = 0;
  fuse_cmd->add_option("--manifest", fu_manifest, "sweep manifest")->required();
  fuse_cmd->add_option("--output", fu_output, "output tensor path")->required();
  fuse_cmd->add_option("--strategy", fu_strategy, "temporal or spatial")
      ->check(CLI::IsMember({"temporal", "spatial"}));
  fuse_cmd->add_option("--n", fu_n, "resolution multiple (spatial; default 2 for 10 frames)")
      ->check(CLI::PositiveNumber);
  add_grid_options(fuse_cmd, fu_grid);
  fuse_cmd->callback([&] { run_fuse(fu_manifest, fu_strategy, fu_n, fu_grid, fu_output, out); });

  // voxelize
  auto* vox_cmd = app.add_subcommand("voxelize", "pool per-point features into voxels");
  std::string vx_input, vx_features, vx_affine, vx_output, vx_mode = "voxel";
  std::string vx_pool_sem = "max", vx_pool_geo = "avg";
  double vx_res = 0.1;
  bool vx_time = false;
  vox_cmd->add_option("--input", vx_input, "point record file")->required();
  vox_cmd->add_option("--output", vx_output, "voxel tensor path")->required();
  vox_cmd->add_option("--features", vx_features, "per-pixel feature map to sample");
  vox_cmd->add_option("--mode", vx_mode, "voxel or pillar")
      ->check(CLI::IsMember({"voxel", "pillar"}));
  vox_cmd->add_option("--bev-res", vx_res, "ground cell size, meters")->check(CLI::PositiveNumber);
  vox_cmd->add_option("--pool-sem", vx_pool_sem, "semantic pooling")
      ->check(CLI::IsMember({"max", "avg"}));
  vox_cmd->add_option("--pool-geo", vx_pool_geo, "geometric pooling")
      ->check(CLI::IsMember({"max", "avg"}));
  vox_cmd->add_flag("--with-time", vx_time, "append t_rel to the geometric features");
  vox_cmd->add_option("--affine", vx_affine, "affine map applied to geometric features");
  vox_cmd->callback([&] {
    run_voxelize(vx_input, vx_features, vx_mode, vx_res, vx_pool_sem, vx_pool_geo, vx_time,
                 vx_affine, vx_output, out);
  });

  // augment
  auto* aug_cmd = app.add_subcommand("augment", "paste database samples and transform the scene");
  std::string au_input, au_boxes, au_db, au_crop_db, au_out_points, au_out_boxes;
  std::size_t au_paste = 0;
  AugmentConfig au_cfg;
  double au_paste_rot_deg = 45.0, au_rot_deg = 45.0;
  GridSpec au_grid;
  aug_cmd->add_option("--input", au_input, "point record file")->required();
  aug_cmd->add_option("--boxes", au_boxes, "box list for the frame")->required();
  aug_cmd->add_option("--db", au_db, "sample database root");
  aug_cmd->add_option("--crop-db", au_crop_db,
                      "crop the frame's boxes into this database root and exit");
  aug_cmd->add_option("--paste", au_paste, "samples to paste");
  aug_cmd->add_option("--seed", au_cfg.rng_seed, "rng seed");
  aug_cmd->add_option("--paste-rot-max-deg", au_paste_rot_deg, "max placement rotation, degrees");
  aug_cmd->add_option("--translation", au_cfg.global_translation, "max |x|,|y| shift, meters");
  aug_cmd->add_option("--rotation-max-deg", au_rot_deg, "max scene rotation, degrees");
  aug_cmd->add_option("--scale-min", au_cfg.global_scale_min, "scene scale lower bound");
  aug_cmd->add_option("--scale-max", au_cfg.global_scale_max, "scene scale upper bound");
  aug_cmd->add_option("--z-offset", au_cfg.paste_z_offset, "vertical offset for pasted samples");
  aug_cmd->add_option("--min-projected", au_cfg.min_projected_points,
                      "survivors required to keep a box");
  aug_cmd->add_option("--output-points", au_out_points, "augmented point record file");
  aug_cmd->add_option("--output-boxes", au_out_boxes, "kept box list");
  add_grid_options(aug_cmd, au_grid);
  aug_cmd->callback([&] {
    au_cfg.paste_rotation_max = au_paste_rot_deg * kPi / 180.0;
    au_cfg.global_rotation = au_rot_deg * kPi / 180.0;
    if (au_crop_db.empty() && (au_out_points.empty() || au_out_boxes.empty())) {
      throw CLI::ValidationError("augment", "--output-points and --output-boxes are required");
    }
    run_augment(au_input, au_boxes, au_db, au_crop_db, au_paste, au_cfg, au_grid, au_out_points,
                au_out_boxes, out);
  });

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "occupancy of the fused image per resolution");
  std::string st_manifest, st_output, st_jsonl;
  std::vector<int> st_n_list{1, 2, 3};
  GridSpec st_grid;
  stats_cmd->add_option("--manifest", st_manifest, "sweep manifest")->required();
  stats_cmd->add_option("--n-list", st_n_list, "resolution multiples")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  stats_cmd->add_option("--output", st_output, "write the table here as well");
  stats_cmd->add_option("--jsonl", st_jsonl, "write machine-readable rows here");
  add_grid_options(stats_cmd, st_grid);
  stats_cmd->callback(
      [&] { run_stats(st_manifest, st_n_list, st_grid, st_output, st_jsonl, out); });

  // nms
  auto* nms_cmd = app.add_subcommand("nms", "suppress overlapping boxes");
  std::string nm_input, nm_output;
  NmsConfig nm_cfg;
  nms_cmd->add_option("--input", nm_input, "box list")->required();
  nms_cmd->add_option("--output", nm_output, "kept box list")->required();
  nms_cmd->add_option("--iou", nm_cfg.iou_threshold, "suppression threshold")
      ->check(CLI::Range(0.0, 1.0));
  nms_cmd->add_option("--max", nm_cfg.max_output, "output cap")->check(CLI::PositiveNumber);
  nms_cmd->add_flag("--per-category", nm_cfg.per_category, "suppress within categories only");
  nms_cmd->callback([&] { run_nms(nm_input, nm_output, nm_cfg, out); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("lidarprep");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace lidarprep
