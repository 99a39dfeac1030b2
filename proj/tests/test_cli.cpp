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

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lidarprep/io.hpp"
#include "lidarprep/parallel.hpp"
#include "lidarprep/range_image.hpp"
#include "lidarprep/voxel.hpp"
#include "test_util.hpp"

using namespace lidarprep;
using lidarprep::testing::TempDir;
using lidarprep::testing::pt;
using nlohmann::json;

namespace {

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliResult result;
  result.status = run_command(args, out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::ptrdiff_t line_count(const std::string& text) {
  return std::count(text.begin(), text.end(), '\n');
}

// Identity poses, timestamps 0.1 * (index + 1), key defaulting to the last
// frame.
std::string write_manifest(const TempDir& dir, const std::string& name,
                           const std::vector<PointCloud>& frames) {
  const json identity = json::array({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
  std::string text;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const std::string file = name + "_" + std::to_string(i) + ".bin";
    write_points(frames[i], dir.file(file));
    json rec{{"points", file}, {"pose", identity}, {"timestamp", 0.1 * (i + 1)}};
    text += rec.dump() + "\n";
  }
  const std::string path = dir.file(name + ".jsonl");
  atomic_write_file(path, text);
  return path;
}

PointCloud single_point(double x, double y, double z) {
  PointCloud cloud;
  cloud.points = {pt(x, y, z, 0.5)};
  return cloud;
}

OrientedBox scored_box(double cx, double cy, const std::string& category, double score) {
  OrientedBox b;
  b.cx = cx;
  b.cy = cy;
  b.cz = 0.0;
  b.l = 2.0;
  b.w = 2.0;
  b.h = 1.0;
  b.category = category;
  b.score = score;
  return b;
}

}  // namespace

TEST_CASE("usage errors print one diagnostic line and return nonzero") {
  SUBCASE("no subcommand") {
    const CliResult r = run_cli({});
    CHECK(r.status != 0);
    CHECK(r.out.empty());
    CHECK(r.err.substr(0, 7) == "error: ");
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("unknown subcommand") {
    const CliResult r = run_cli({"frobnicate"});
    CHECK(r.status != 0);
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("missing required option") {
    const CliResult r = run_cli({"project", "--input", "x.bin"});
    CHECK(r.status != 0);
    CHECK(r.err.substr(0, 7) == "error: ");
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("option out of range") {
    const CliResult r = run_cli({"nms", "--input", "a", "--output", "b", "--iou", "1.5"});
    CHECK(r.status != 0);
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("feature width below the minimum") {
    const CliResult r = run_cli(
        {"project", "--input", "a", "--output", "b", "--features", "f", "--feature-dim", "4"});
    CHECK(r.status != 0);
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("missing input file") {
    TempDir dir;
    const CliResult r =
        run_cli({"project", "--input", dir.file("absent.bin"), "--output", dir.file("o.bin")});
    CHECK(r.status == 1);
    CHECK(r.err.substr(0, 7) == "error: ");
    CHECK(r.err.find("cannot open") != std::string::npos);
    CHECK(line_count(r.err) == 1);
  }
}

TEST_CASE("help requests exit cleanly") {
  const CliResult top = run_cli({"--help"});
  CHECK(top.status == 0);
  CHECK(top.err.empty());
  CHECK(top.out.find("project") != std::string::npos);
  CHECK(top.out.find("voxelize") != std::string::npos);

  const CliResult sub = run_cli({"project", "--help"});
  CHECK(sub.status == 0);
  CHECK(sub.out.find("--input") != std::string::npos);
  CHECK(sub.out.find("--az-step") != std::string::npos);
}

TEST_CASE("project reports the survival tally and writes the image") {
  TempDir dir;
  PointCloud cloud;
  cloud.points = {pt(10.0, 0.0, 0.0, 0.5), pt(20.0, 0.0, 0.0, 0.25), pt(0.0, 0.0, 0.0),
                  pt(0.0, 0.0, 50.0)};
  write_points(cloud, dir.file("in.bin"));

  const CliResult r = run_cli(
      {"project", "--input", dir.file("in.bin"), "--output", dir.file("image.bin")});
  CHECK(r.status == 0);
  CHECK(r.err.empty());
  CHECK(r.out ==
        "projected 4 points onto 32x1152: 1 survived, 1 out of view, 1 displaced, "
        "1 degenerate; occupancy 0.000027\n");

  const RangeImage img = read_range_image(dir.file("image.bin"));
  CHECK(img.rows == 32);
  CHECK(img.cols == 1152);
  CHECK(img.occupied_count() == 1);
}

TEST_CASE("project honors a custom grid") {
  TempDir dir;
  write_points(single_point(10.0, 0.0, 0.0), dir.file("in.bin"));
  const CliResult r = run_cli({"project", "--input", dir.file("in.bin"), "--output",
                               dir.file("image.bin"), "--az-min", "-90", "--az-max", "90",
                               "--az-step", "0.5", "--el-min", "-10", "--el-max", "10", "--el-step",
                               "2"});
  CHECK(r.status == 0);
  CHECK(r.out.find("onto 10x360") != std::string::npos);
  CHECK(read_range_image(dir.file("image.bin")).cols == 360);
}

TEST_CASE("project renders channels and extracts features on request") {
  TempDir dir;
  write_points(single_point(10.0, 0.0, 0.0), dir.file("in.bin"));
  const CliResult r = run_cli({"project", "--input", dir.file("in.bin"), "--output",
                               dir.file("image.bin"), "--render", dir.file("render"), "--features",
                               dir.file("features.bin"), "--feature-dim", "16"});
  CHECK(r.status == 0);

  for (const char* name : {"range", "height", "elevation", "reflectance", "mask"}) {
    const std::string pgm = read_file(dir.file("render/" + std::string(name) + ".pgm"));
    CHECK(pgm.substr(0, 12) == "P5\n1152 32\n2");
    CHECK(pgm.size() == 15 + 32u * 1152);
  }

  const FeatureMap fmap = read_feature_map(dir.file("features.bin"));
  CHECK(fmap.rows == 32);
  CHECK(fmap.cols == 1152);
  CHECK(fmap.dim == 16);
  const auto grid = read_feature_map_grid(dir.file("features.bin"));
  REQUIRE(grid.has_value());
  CHECK(grid->az_step_deg == 0.3125);
}

TEST_CASE("fuse temporal writes a batch with per-frame projections") {
  TempDir dir;
  const std::string manifest =
      write_manifest(dir, "sweep", {single_point(5.0, 0.0, 0.0), single_point(0.0, 5.0, 0.0)});
  const CliResult r = run_cli(
      {"fuse", "--manifest", manifest, "--strategy", "temporal", "--output", dir.file("batch.bin")});
  CHECK(r.status == 0);
  CHECK(r.out == "fused 2 frames into a batch; 2 points survived\n");

  const auto [header, payload] = read_tensor(dir.file("batch.bin"));
  CHECK(header.kind == "range_image_batch");
  CHECK(header.shape == std::vector<std::int64_t>{2, 32, 1152, 5});
}

TEST_CASE("fuse spatial defaults to the single-frame grid") {
  TempDir dir;
  const std::string manifest =
      write_manifest(dir, "sweep", {single_point(5.0, 0.0, 0.0), single_point(0.0, 5.0, 0.0)});
  const CliResult r =
      run_cli({"fuse", "--manifest", manifest, "--output", dir.file("fused.bin")});
  CHECK(r.status == 0);
  CHECK(r.out == "fused 2 frames at n=1 onto 32x1152; occupancy 0.000054\n");
  CHECK(read_range_image(dir.file("fused.bin")).cols == 1152);
}

TEST_CASE("fuse spatial doubles the resolution for ten-frame sets") {
  TempDir dir;
  std::vector<PointCloud> frames;
  for (int i = 0; i < 10; ++i) frames.push_back(single_point(i + 1.0, 0.0, 0.0));
  const std::string manifest = write_manifest(dir, "sweep", frames);

  const CliResult r =
      run_cli({"fuse", "--manifest", manifest, "--output", dir.file("fused.bin")});
  CHECK(r.status == 0);
  CHECK(r.out == "fused 10 frames at n=2 onto 64x2304; occupancy 0.000007\n");

  const CliResult r3 = run_cli(
      {"fuse", "--manifest", manifest, "--n", "3", "--output", dir.file("fused3.bin")});
  CHECK(r3.status == 0);
  CHECK(r3.out.find("at n=3 onto 96x3456") != std::string::npos);
}

TEST_CASE("voxelize pools geometry and reports the cell count") {
  TempDir dir;
  PointCloud cloud;
  cloud.points = {pt(0.05, 0.05, 0.0, 0.5), pt(0.04, 0.06, 0.01, 0.25), pt(1.0, 1.0, 1.0, 0.75),
                  pt(99.0, 0.0, 0.0)};
  write_points(cloud, dir.file("in.bin"));

  SUBCASE("voxel mode") {
    const CliResult r =
        run_cli({"voxelize", "--input", dir.file("in.bin"), "--output", dir.file("vox.bin")});
    CHECK(r.status == 0);
    CHECK(r.out == "voxelized 4 points into 2 voxels (feature width 7)\n");
    const VoxelFeatureTensor tensor = read_voxel_tensor(dir.file("vox.bin"));
    CHECK(tensor.coords.size() == 2);
    CHECK(tensor.dim_sem == 0);
    CHECK(tensor.dim_geo == 7);
    CHECK(tensor.spec.mode == VoxelMode::kVoxel);
  }
  SUBCASE("time channel") {
    const CliResult r = run_cli({"voxelize", "--input", dir.file("in.bin"), "--with-time",
                                 "--output", dir.file("vox.bin")});
    CHECK(r.status == 0);
    CHECK(r.out.find("feature width 8") != std::string::npos);
  }
  SUBCASE("pillar mode") {
    const CliResult r = run_cli({"voxelize", "--input", dir.file("in.bin"), "--mode", "pillar",
                                 "--bev-res", "0.2", "--pool-sem", "avg", "--pool-geo", "max",
                                 "--output", dir.file("vox.bin")});
    CHECK(r.status == 0);
    CHECK(r.out.find("pillars") != std::string::npos);
    CHECK(read_voxel_tensor(dir.file("vox.bin")).spec.mode == VoxelMode::kPillar);
  }
  SUBCASE("sampled semantic features") {
    const CliResult pr = run_cli({"project", "--input", dir.file("in.bin"), "--output",
                                  dir.file("img.bin"), "--features", dir.file("fmap.bin"),
                                  "--feature-dim", "16"});
    REQUIRE(pr.status == 0);
    const CliResult r = run_cli({"voxelize", "--input", dir.file("in.bin"), "--features",
                                 dir.file("fmap.bin"), "--output", dir.file("vox.bin")});
    CHECK(r.status == 0);
    CHECK(r.out == "voxelized 4 points into 2 voxels (feature width 23)\n");
    const VoxelFeatureTensor tensor = read_voxel_tensor(dir.file("vox.bin"));
    CHECK(tensor.dim_sem == 16);
    CHECK(tensor.dim_geo == 7);
  }
  SUBCASE("affine projection of the geometric block") {
    AffineMap map;
    map.in_dim = 7;
    map.out_dim = 2;
    map.weight.assign(14, 0.0);
    map.weight[0] = 1.0;   // out0 = x
    map.weight[10] = 1.0;  // out1 = r
    map.bias = {0.0, 0.5};
    write_affine_map(map, dir.file("affine.json"));
    const CliResult r = run_cli({"voxelize", "--input", dir.file("in.bin"), "--affine",
                                 dir.file("affine.json"), "--output", dir.file("vox.bin")});
    CHECK(r.status == 0);
    CHECK(r.out.find("feature width 2") != std::string::npos);
  }
  SUBCASE("invalid mode") {
    const CliResult r = run_cli({"voxelize", "--input", dir.file("in.bin"), "--mode", "octree",
                                 "--output", dir.file("vox.bin")});
    CHECK(r.status != 0);
    CHECK(line_count(r.err) == 1);
  }
}

TEST_CASE("augment crops a database and pastes from it deterministically") {
  TempDir dir;

  // Source frame: one 3-point car instance plus background.
  PointCloud source;
  source.points = {pt(5.0, 0.0, 0.0, 0.5), pt(5.5, 0.25, 0.25, 0.75), pt(4.5, -0.25, -0.25, 0.25),
                   pt(-20.0, 5.0, 0.0, 0.125)};
  write_points(source, dir.file("source.bin"));
  OrientedBox car;
  car.cx = 5.0;
  car.l = 4.0;
  car.w = 2.0;
  car.h = 2.0;
  car.category = "car";
  car.score = 0.9;
  write_boxes({car}, dir.file("source_boxes.jsonl"));

  const std::string db = dir.file("db");
  const CliResult crop = run_cli({"augment", "--input", dir.file("source.bin"), "--boxes",
                                  dir.file("source_boxes.jsonl"), "--crop-db", db});
  REQUIRE(crop.status == 0);
  CHECK(crop.out == "cropped 1 samples into " + db + "\n");
  CHECK(read_points(db + "/car/000000.bin").size() == 3);

  // Target frame: background only, no annotated boxes.
  PointCloud target;
  target.points = {pt(-20.0, 5.0, 0.0, 0.5), pt(-20.0, 5.0, 1.0, 0.5), pt(-21.0, 4.0, 0.0, 0.5)};
  write_points(target, dir.file("target.bin"));
  write_boxes({}, dir.file("target_boxes.jsonl"));

  const std::vector<std::string> base = {
      "augment",        "--input",       dir.file("target.bin"),
      "--boxes",        dir.file("target_boxes.jsonl"),
      "--db",           db,
      "--paste",        "1",
      "--translation",  "0",
      "--rotation-max-deg", "0",
      "--scale-min",    "1",
      "--scale-max",    "1",
      "--min-projected", "0"};

  SUBCASE("a collapsed transform restores the sample exactly") {
    std::vector<std::string> args = base;
    args.insert(args.end(), {"--paste-rot-max-deg", "0", "--seed", "7", "--output-points",
                             dir.file("out.bin"), "--output-boxes", dir.file("out.jsonl")});
    const CliResult r = run_cli(args);
    CHECK(r.status == 0);
    CHECK(r.out ==
          "augmented frame: 1 samples pasted, 0 rejected by overlap, 0 boxes removed by "
          "visibility; 1 boxes and 6 points kept\n");

    const PointCloud out = read_points(dir.file("out.bin"));
    REQUIRE(out.size() == 6);
    CHECK(out.points[0].x == -20.0);  // frame points first
    CHECK(out.points[3].x == 5.0);    // pasted sample afterwards
    CHECK(out.points[4].x == 5.5);

    const std::vector<OrientedBox> boxes = read_boxes(dir.file("out.jsonl"));
    REQUIRE(boxes.size() == 1);
    CHECK(boxes[0].cx == 5.0);
    CHECK(boxes[0].yaw == 0.0);
    CHECK(boxes[0].category == "car");
  }
  SUBCASE("the seed pins the output bytes") {
    auto run_with = [&](const std::string& seed, const std::string& tag) {
      std::vector<std::string> args = base;
      args.insert(args.end(),
                  {"--paste-rot-max-deg", "45", "--seed", seed, "--output-points",
                   dir.file(tag + ".bin"), "--output-boxes", dir.file(tag + ".jsonl")});
      REQUIRE(run_cli(args).status == 0);
    };
    run_with("7", "a");
    run_with("7", "b");
    run_with("8", "c");
    CHECK(read_file(dir.file("a.bin")) == read_file(dir.file("b.bin")));
    CHECK(read_file(dir.file("a.jsonl")) == read_file(dir.file("b.jsonl")));
    CHECK(read_file(dir.file("a.jsonl")) != read_file(dir.file("c.jsonl")));
  }
  SUBCASE("outputs are required outside the crop flow") {
    const CliResult r = run_cli({"augment", "--input", dir.file("target.bin"), "--boxes",
                                 dir.file("target_boxes.jsonl"), "--db", db, "--paste", "1"});
    CHECK(r.status != 0);
    CHECK(r.err.find("--output-points") != std::string::npos);
    CHECK(line_count(r.err) == 1);
  }
  SUBCASE("a missing database is a runtime error") {
    const CliResult r = run_cli({"augment", "--input", dir.file("target.bin"), "--boxes",
                                 dir.file("target_boxes.jsonl"), "--db", dir.file("nowhere"),
                                 "--paste", "1", "--output-points", dir.file("o.bin"),
                                 "--output-boxes", dir.file("o.jsonl")});
    CHECK(r.status == 1);
    CHECK(r.err.substr(0, 7) == "error: ");
  }
}

TEST_CASE("stats prints the occupancy table and optional machine rows") {
  TempDir dir;
  const std::string manifest =
      write_manifest(dir, "sweep", {single_point(5.0, 0.0, 0.0), single_point(0.0, 5.0, 0.0)});
  const CliResult r = run_cli({"stats", "--manifest", manifest, "--n-list", "1,2", "--output",
                               dir.file("table.txt"), "--jsonl", dir.file("rows.jsonl")});
  CHECK(r.status == 0);
  const std::string expected =
      "  n  occupancy\n"
      "  1  0.000054\n"
      "  2  0.000014\n";
  CHECK(r.out == expected);
  CHECK(read_file(dir.file("table.txt")) == expected);
  CHECK(read_file(dir.file("rows.jsonl")) ==
        "{\"n\": 1, \"tau\": 0.000054}\n{\"n\": 2, \"tau\": 0.000014}\n");
}

TEST_CASE("nms filters a box list on disk") {
  TempDir dir;
  const std::vector<OrientedBox> boxes = {scored_box(0.0, 0.0, "car", 0.9),
                                          scored_box(0.0, 0.0, "pedestrian", 0.5),
                                          scored_box(30.0, 0.0, "car", 0.8)};
  write_boxes(boxes, dir.file("boxes.jsonl"));

  SUBCASE("default threshold suppresses the duplicate") {
    const CliResult r =
        run_cli({"nms", "--input", dir.file("boxes.jsonl"), "--output", dir.file("kept.jsonl")});
    CHECK(r.status == 0);
    CHECK(r.out == "kept 2 of 3 boxes\n");
    const std::vector<OrientedBox> kept = read_boxes(dir.file("kept.jsonl"));
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].score == 0.9);
    CHECK(kept[1].score == 0.8);
  }
  SUBCASE("per-category keeps the pedestrian") {
    const CliResult r = run_cli({"nms", "--input", dir.file("boxes.jsonl"), "--output",
                                 dir.file("kept.jsonl"), "--per-category"});
    CHECK(r.status == 0);
    CHECK(r.out == "kept 3 of 3 boxes\n");
  }
  SUBCASE("suppression requires strictly exceeding the threshold") {
    const CliResult r = run_cli({"nms", "--input", dir.file("boxes.jsonl"), "--output",
                                 dir.file("kept.jsonl"), "--iou", "1.0"});
    CHECK(r.status == 0);
    CHECK(r.out == "kept 3 of 3 boxes\n");
  }
  SUBCASE("the cap limits the output") {
    const CliResult r = run_cli({"nms", "--input", dir.file("boxes.jsonl"), "--output",
                                 dir.file("kept.jsonl"), "--max", "1"});
    CHECK(r.status == 0);
    CHECK(r.out == "kept 1 of 3 boxes\n");
  }
}

TEST_CASE("the thread count option is accepted ahead of the subcommand") {
  TempDir dir;
  write_points(single_point(10.0, 0.0, 0.0), dir.file("in.bin"));
  const CliResult r = run_cli({"--threads", "2", "project", "--input", dir.file("in.bin"),
                               "--output", dir.file("image.bin")});
  CHECK(r.status == 0);
  par::set_thread_count(1);

  const CliResult bad = run_cli({"--threads", "0", "project", "--input", dir.file("in.bin"),
                                 "--output", dir.file("image.bin")});
  CHECK(bad.status != 0);
  CHECK(line_count(bad.err) == 1);
}
