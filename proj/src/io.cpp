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

#include "lidarprep/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialized payloads assume a little-endian host");

namespace lidarprep {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kPointRecordBytes = 5 * sizeof(float);

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw std::runtime_error(path + ": " + message);
}

std::string f32_bytes(const std::vector<float>& values) {
  std::string bytes(values.size() * sizeof(float), '\0');
  if (!values.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
  return bytes;
}

std::vector<float> f32_values(const std::string& bytes, const std::string& path) {
  if (bytes.size() % sizeof(float) != 0) fail(path, "payload is not a whole number of f32 values");
  std::vector<float> values(bytes.size() / sizeof(float));
  if (!values.empty()) std::memcpy(values.data(), bytes.data(), bytes.size());
  return values;
}

json grid_to_json(const GridSpec& g) {
  return json{{"az_min_deg", g.az_min_deg}, {"az_max_deg", g.az_max_deg},
              {"az_step_deg", g.az_step_deg}, {"el_min_deg", g.el_min_deg},
              {"el_max_deg", g.el_max_deg}, {"el_step_deg", g.el_step_deg}};
}

GridSpec grid_from_json(const json& j) {
  GridSpec g;
  g.az_min_deg = j.at("az_min_deg").get<double>();
  g.az_max_deg = j.at("az_max_deg").get<double>();
  g.az_step_deg = j.at("az_step_deg").get<double>();
  g.el_min_deg = j.at("el_min_deg").get<double>();
  g.el_max_deg = j.at("el_max_deg").get<double>();
  g.el_step_deg = j.at("el_step_deg").get<double>();
  return g;
}

json voxel_to_json(const VoxelSpec& v) {
  return json{{"x_min", v.x_min}, {"x_max", v.x_max}, {"y_min", v.y_min}, {"y_max", v.y_max},
              {"z_min", v.z_min}, {"z_max", v.z_max}, {"dx", v.dx},       {"dy", v.dy},
              {"dz", v.dz},       {"mode", v.mode == VoxelMode::kPillar ? "pillar" : "voxel"}};
}

VoxelSpec voxel_from_json(const json& j, const std::string& path) {
  VoxelSpec v;
  v.x_min = j.at("x_min").get<double>();
  v.x_max = j.at("x_max").get<double>();
  v.y_min = j.at("y_min").get<double>();
  v.y_max = j.at("y_max").get<double>();
  v.z_min = j.at("z_min").get<double>();
  v.z_max = j.at("z_max").get<double>();
  v.dx = j.at("dx").get<double>();
  v.dy = j.at("dy").get<double>();
  v.dz = j.at("dz").get<double>();
  const std::string mode = j.at("mode").get<std::string>();
  if (mode == "pillar") {
    v.mode = VoxelMode::kPillar;
  } else if (mode == "voxel") {
    v.mode = VoxelMode::kVoxel;
  } else {
    fail(path, "unknown voxel mode '" + mode + "'");
  }
  return v;
}

json parse_json(const std::string& text, const std::string& path) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(path, "malformed structured text");
  return j;
}

std::string sidecar_path(const std::string& path) { return path + ".json"; }

TensorHeader read_header(const std::string& path) {
  const std::string meta = sidecar_path(path);
  const json j = parse_json(read_file(meta), meta);
  TensorHeader header;
  header.kind = j.at("kind").get<std::string>();
  header.shape = j.at("shape").get<std::vector<std::int64_t>>();
  header.dtype = j.at("dtype").get<std::string>();
  header.layout = j.at("layout").get<std::string>();
  header.channels = j.at("channels").get<std::vector<std::string>>();
  if (j.contains("grid")) header.grid = grid_from_json(j.at("grid"));
  if (j.contains("voxel")) header.voxel = voxel_from_json(j.at("voxel"), meta);
  if (j.contains("dim_sem")) header.dim_sem = j.at("dim_sem").get<int>();
  if (j.contains("dim_geo")) header.dim_geo = j.at("dim_geo").get<int>();
  if (header.dtype != "f32") fail(meta, "unsupported element type '" + header.dtype + "'");
  if (header.shape.empty()) fail(meta, "empty shape");
  for (std::int64_t d : header.shape) {
    if (d < 0) fail(meta, "negative shape entry");
  }
  return header;
}

std::vector<std::string> feature_channel_names(int dim) {
  std::vector<std::string> names;
  names.reserve(dim);
  for (int i = 0; i < dim; ++i) names.push_back("c" + std::to_string(i));
  return names;
}

OrientedBox box_from_json(const json& j, const std::string& path) {
  for (const char* field : {"cx", "cy", "cz", "l", "w", "h", "yaw", "category", "score"}) {
    if (!j.contains(field)) fail(path, std::string("box record missing field '") + field + "'");
  }
  OrientedBox box;
  box.cx = j.at("cx").get<double>();
  box.cy = j.at("cy").get<double>();
  box.cz = j.at("cz").get<double>();
  box.l = j.at("l").get<double>();
  box.w = j.at("w").get<double>();
  box.h = j.at("h").get<double>();
  box.yaw = j.at("yaw").get<double>();
  box.category = j.at("category").get<std::string>();
  box.score = j.at("score").get<double>();
  if (j.contains("num_points")) box.num_points = j.at("num_points").get<std::int64_t>();
  return box;
}

json box_to_json(const OrientedBox& box) {
  return json{{"cx", box.cx},         {"cy", box.cy},
              {"cz", box.cz},         {"l", box.l},
              {"w", box.w},           {"h", box.h},
              {"yaw", box.yaw},       {"category", box.category},
              {"score", box.score}};
}

// Splits line-delimited structured text, ignoring blank lines.
std::vector<json> parse_records(const std::string& path) {
  const std::string text = read_file(path);
  std::vector<json> records;
  std::istringstream stream(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(stream, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) fail(path, "malformed record on line " + std::to_string(lineno));
    records.push_back(std::move(j));
  }
  return records;
}

}  // namespace

void atomic_write_file(const std::string& path, const std::string& bytes) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(tmp.string(), "cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(tmp.string(), "write failed");
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(path, "read failed");
  return std::move(buffer).str();
}

PointCloud read_points(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() % kPointRecordBytes != 0) {
    fail(path, "length " + std::to_string(bytes.size()) + " is not a multiple of 20");
  }
  const std::size_t count = bytes.size() / kPointRecordBytes;
  PointCloud cloud;
  cloud.frame_id = path;
  cloud.points.resize(count);
  cloud.rings.resize(count);
  std::size_t bad = 0;
  for (std::size_t i = 0; i < count; ++i) {
    float record[5];
    std::memcpy(record, bytes.data() + i * kPointRecordBytes, kPointRecordBytes);
    for (float v : record) {
      if (!std::isfinite(v)) {
        ++bad;
        break;
      }
    }
    Point& p = cloud.points[i];
    p.x = record[0];
    p.y = record[1];
    p.z = record[2];
    p.intensity = record[3];
    cloud.rings[i] = record[4];
  }
  if (bad > 0) fail(path, std::to_string(bad) + " records contain non-finite values");
  return cloud;
}

void write_points(const PointCloud& cloud, const std::string& path) {
  const bool ringed = cloud.rings.size() == cloud.points.size();
  std::vector<float> values;
  values.reserve(cloud.size() * 5);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point& p = cloud.points[i];
    values.push_back(static_cast<float>(p.x));
    values.push_back(static_cast<float>(p.y));
    values.push_back(static_cast<float>(p.z));
    values.push_back(static_cast<float>(p.intensity));
    values.push_back(ringed ? cloud.rings[i] : 0.0f);
  }
  atomic_write_file(path, f32_bytes(values));
}

std::int64_t TensorHeader::element_count() const {
  std::int64_t product = 1;
  for (std::int64_t d : shape) product *= d;
  return product;
}

void write_tensor(const std::string& path, const TensorHeader& header,
                  const std::vector<float>& payload) {
  if (static_cast<std::int64_t>(payload.size()) != header.element_count()) {
    fail(path, "payload size does not match the declared shape");
  }
  json j{{"kind", header.kind},
         {"shape", header.shape},
         {"dtype", header.dtype},
         {"layout", header.layout},
         {"channels", header.channels}};
  if (header.grid) j["grid"] = grid_to_json(*header.grid);
  if (header.voxel) j["voxel"] = voxel_to_json(*header.voxel);
  if (header.kind == "voxel_features") {
    j["dim_sem"] = header.dim_sem;
    j["dim_geo"] = header.dim_geo;
  }
  atomic_write_file(path, f32_bytes(payload));
  atomic_write_file(sidecar_path(path), j.dump(2) + "\n");
}

std::pair<TensorHeader, std::vector<float>> read_tensor(const std::string& path) {
  TensorHeader header = read_header(path);
  std::vector<float> payload = f32_values(read_file(path), path);
  if (static_cast<std::int64_t>(payload.size()) != header.element_count()) {
    fail(path, "payload size does not match the sidecar shape");
  }
  return {std::move(header), std::move(payload)};
}

namespace {

void append_image_payload(const RangeImage& img, std::vector<float>& payload) {
  const std::vector<double>* channels[5] = {&img.range, &img.height, &img.elevation,
                                            &img.reflectance, &img.mask};
  for (std::size_t p = 0; p < img.pixel_count(); ++p) {
    for (const auto* ch : channels) payload.push_back(static_cast<float>((*ch)[p]));
  }
}

TensorHeader image_header(const RangeImage& img) {
  TensorHeader header;
  header.kind = "range_image";
  header.shape = {img.rows, img.cols, 5};
  header.channels = {"range", "height", "elevation", "reflectance", "mask"};
  header.grid = img.spec;
  return header;
}

}  // namespace

void write_range_image(const RangeImage& img, const std::string& path) {
  std::vector<float> payload;
  payload.reserve(img.pixel_count() * 5);
  append_image_payload(img, payload);
  write_tensor(path, image_header(img), payload);
}

RangeImage read_range_image(const std::string& path) {
  auto [header, payload] = read_tensor(path);
  if (header.kind != "range_image") fail(path, "not a range image tensor");
  if (header.shape.size() != 3 || header.shape[2] != 5) fail(path, "expected shape (rows, cols, 5)");
  if (!header.grid) fail(path, "missing grid description");
  RangeImage img;
  img.spec = *header.grid;
  validate(img.spec);
  if (img.spec.rows() != header.shape[0] || img.spec.cols() != header.shape[1]) {
    fail(path, "grid does not match the tensor shape");
  }
  img.rows = static_cast<int>(header.shape[0]);
  img.cols = static_cast<int>(header.shape[1]);
  const std::size_t npix = img.pixel_count();
  img.range.resize(npix);
  img.height.resize(npix);
  img.elevation.resize(npix);
  img.reflectance.resize(npix);
  img.mask.resize(npix);
  std::vector<double>* channels[5] = {&img.range, &img.height, &img.elevation, &img.reflectance,
                                      &img.mask};
  for (std::size_t p = 0; p < npix; ++p) {
    for (int ch = 0; ch < 5; ++ch) (*channels[ch])[p] = payload[p * 5 + ch];
  }
  return img;
}

void write_range_image_batch(const std::vector<RangeImage>& images, const std::string& path) {
  if (images.empty()) fail(path, "cannot write an empty image batch");
  TensorHeader header = image_header(images.front());
  header.kind = "range_image_batch";
  header.shape = {static_cast<std::int64_t>(images.size()), images.front().rows,
                  images.front().cols, 5};
  std::vector<float> payload;
  payload.reserve(images.size() * images.front().pixel_count() * 5);
  for (const RangeImage& img : images) {
    if (img.rows != images.front().rows || img.cols != images.front().cols) {
      fail(path, "batch images must share one raster shape");
    }
    append_image_payload(img, payload);
  }
  write_tensor(path, header, payload);
}

void write_feature_map(const FeatureMap& fmap, const std::string& path,
                       const std::optional<GridSpec>& grid) {
  TensorHeader header;
  header.kind = "feature_map";
  header.shape = {fmap.rows, fmap.cols, fmap.dim};
  header.channels = feature_channel_names(fmap.dim);
  header.grid = grid;
  std::vector<float> payload;
  payload.reserve(fmap.values.size());
  for (double v : fmap.values) payload.push_back(static_cast<float>(v));
  write_tensor(path, header, payload);
}

FeatureMap read_feature_map(const std::string& path) {
  auto [header, payload] = read_tensor(path);
  if (header.kind != "feature_map") fail(path, "not a feature map tensor");
  if (header.shape.size() != 3) fail(path, "expected shape (rows, cols, dim)");
  FeatureMap fmap;
  fmap.rows = static_cast<int>(header.shape[0]);
  fmap.cols = static_cast<int>(header.shape[1]);
  fmap.dim = static_cast<int>(header.shape[2]);
  fmap.values.assign(payload.begin(), payload.end());
  return fmap;
}

std::optional<GridSpec> read_feature_map_grid(const std::string& path) {
  return read_header(path).grid;
}

void write_voxel_tensor(const VoxelFeatureTensor& tensor, const std::string& path) {
  TensorHeader header;
  header.kind = "voxel_features";
  header.shape = {static_cast<std::int64_t>(tensor.coords.size()), 3 + tensor.dim()};
  header.channels = {"ix", "iy", "iz"};
  for (const std::string& name : feature_channel_names(tensor.dim())) header.channels.push_back(name);
  header.voxel = tensor.spec;
  header.dim_sem = tensor.dim_sem;
  header.dim_geo = tensor.dim_geo;
  std::vector<float> payload;
  payload.reserve(tensor.coords.size() * (3 + tensor.dim()));
  for (std::size_t cell = 0; cell < tensor.coords.size(); ++cell) {
    payload.push_back(static_cast<float>(tensor.coords[cell].ix));
    payload.push_back(static_cast<float>(tensor.coords[cell].iy));
    payload.push_back(static_cast<float>(tensor.coords[cell].iz));
    for (int c = 0; c < tensor.dim(); ++c) {
      payload.push_back(static_cast<float>(tensor.features[tensor.at(cell) + c]));
    }
  }
  write_tensor(path, header, payload);
}

VoxelFeatureTensor read_voxel_tensor(const std::string& path) {
  auto [header, payload] = read_tensor(path);
  if (header.kind != "voxel_features") fail(path, "not a voxel feature tensor");
  if (header.shape.size() != 2) fail(path, "expected shape (cells, 3 + dim)");
  if (!header.voxel) fail(path, "missing voxel description");
  VoxelFeatureTensor tensor;
  tensor.spec = *header.voxel;
  tensor.dim_sem = header.dim_sem;
  tensor.dim_geo = header.dim_geo;
  if (header.shape[1] != 3 + tensor.dim()) fail(path, "width does not match dim_sem + dim_geo");
  const std::int64_t cells = header.shape[0];
  const std::int64_t width = header.shape[1];
  tensor.coords.resize(cells);
  tensor.features.resize(cells * (width - 3));
  for (std::int64_t cell = 0; cell < cells; ++cell) {
    const float* row = payload.data() + cell * width;
    tensor.coords[cell] = {static_cast<std::int32_t>(row[0]), static_cast<std::int32_t>(row[1]),
                           static_cast<std::int32_t>(row[2])};
    for (std::int64_t c = 0; c + 3 < width; ++c) {
      tensor.features[cell * (width - 3) + c] = row[3 + c];
    }
  }
  return tensor;
}

std::vector<OrientedBox> read_boxes(const std::string& path) {
  std::vector<OrientedBox> boxes;
  for (const json& record : parse_records(path)) boxes.push_back(box_from_json(record, path));
  return boxes;
}

void write_boxes(const std::vector<OrientedBox>& boxes, const std::string& path) {
  std::string text;
  for (const OrientedBox& box : boxes) text += box_to_json(box).dump() + "\n";
  atomic_write_file(path, text);
}

SweepSet read_sweep_manifest(const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  SweepSet sweeps;
  bool key_seen = false;
  const std::vector<json> records = parse_records(path);
  for (const json& record : records) {
    SweepFrame frame;
    const std::string points = record.at("points").get<std::string>();
    frame.cloud = read_points((base / points).string());
    frame.cloud.frame_id = points;
    frame.timestamp = record.at("timestamp").get<double>();

    const std::vector<double> pose = record.at("pose").get<std::vector<double>>();
    if (pose.size() != 16) fail(path, "pose must hold 16 row-major values");
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) frame.pose_to_key.rotation[3 * i + j] = pose[4 * i + j];
      frame.pose_to_key.translation[i] = pose[4 * i + 3];
    }
    const double bottom[4] = {0.0, 0.0, 0.0, 1.0};
    for (int j = 0; j < 4; ++j) {
      if (std::abs(pose[12 + j] - bottom[j]) > 1e-9) fail(path, "pose bottom row must be 0 0 0 1");
    }

    if (record.value("key", false)) {
      if (key_seen) fail(path, "more than one frame is marked as the key");
      key_seen = true;
      sweeps.key_index = sweeps.frames.size();
    }
    sweeps.frames.push_back(std::move(frame));
  }
  if (sweeps.frames.empty()) fail(path, "manifest lists no frames");
  if (!key_seen) sweeps.key_index = sweeps.frames.size() - 1;
  validate(sweeps);
  return sweeps;
}

void save_gt_database(const std::vector<GtSample>& samples, const std::string& root) {
  std::map<std::string, std::vector<const GtSample*>> by_category;
  for (const GtSample& sample : samples) {
    if (!is_valid(sample)) {
      throw std::runtime_error(root + ": sample has points outside its box");
    }
    by_category[sample.category.empty() ? "_" : sample.category].push_back(&sample);
  }
  for (const auto& [category, members] : by_category) {
    const fs::path dir = fs::path(root) / category;
    fs::create_directories(dir);
    std::string metadata;
    for (std::size_t i = 0; i < members.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "%06zu.bin", i);
      write_points(members[i]->points, (dir / name).string());
      json record{{"points", name},
                  {"box", box_to_json(members[i]->box)},
                  {"category", members[i]->category},
                  {"source_frame", members[i]->source_frame},
                  {"num_points", static_cast<std::int64_t>(members[i]->points.size())}};
      metadata += record.dump() + "\n";
    }
    atomic_write_file((dir / "samples.jsonl").string(), metadata);
  }
}

std::vector<GtSample> load_gt_database(const std::string& root) {
  if (!fs::is_directory(root)) fail(root, "not a directory");
  std::vector<std::string> categories;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) categories.push_back(entry.path().filename().string());
  }
  std::sort(categories.begin(), categories.end());

  std::vector<GtSample> samples;
  for (const std::string& category : categories) {
    const fs::path dir = fs::path(root) / category;
    const std::string meta = (dir / "samples.jsonl").string();
    for (const json& record : parse_records(meta)) {
      GtSample sample;
      sample.box = box_from_json(record.at("box"), meta);
      sample.box.num_points = record.at("num_points").get<std::int64_t>();
      sample.category = record.at("category").get<std::string>();
      sample.source_frame = record.at("source_frame").get<std::string>();
      sample.points = read_points((dir / record.at("points").get<std::string>()).string());
      sample.points.frame_id = sample.source_frame;
      if (!is_valid(sample)) fail(meta, "sample points fall outside the stored box");
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

void write_pgm(const std::string& path, int rows, int cols,
               const std::vector<std::uint8_t>& gray) {
  if (gray.size() != static_cast<std::size_t>(rows) * cols) {
    fail(path, "pixel count does not match the raster shape");
  }
  std::string bytes = "P5\n" + std::to_string(cols) + " " + std::to_string(rows) + "\n255\n";
  bytes.append(reinterpret_cast<const char*>(gray.data()), gray.size());
  atomic_write_file(path, bytes);
}

AffineMap read_affine_map(const std::string& path) {
  const json j = parse_json(read_file(path), path);
  AffineMap map;
  map.in_dim = j.at("in_dim").get<int>();
  map.out_dim = j.at("out_dim").get<int>();
  map.weight = j.at("weight").get<std::vector<double>>();
  map.bias = j.at("bias").get<std::vector<double>>();
  validate(map);
  return map;
}

void write_affine_map(const AffineMap& map, const std::string& path) {
  validate(map);
  const json j{{"in_dim", map.in_dim},
               {"out_dim", map.out_dim},
               {"weight", map.weight},
               {"bias", map.bias}};
  atomic_write_file(path, j.dump(2) + "\n");
}

}  // namespace lidarprep
