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

#ifndef LIDARPREP_IO_HPP_
#define LIDARPREP_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lidarprep/augment.hpp"
#include "lidarprep/fusion.hpp"
#include "lidarprep/geometry.hpp"
#include "lidarprep/range_image.hpp"
#include "lidarprep/semantic.hpp"
#include "lidarprep/temporal.hpp"
#include "lidarprep/voxel.hpp"

// All writers are atomic: content goes to a temporary file in the target
// directory which is renamed into place, so readers never observe partial
// files. All binary payloads are little-endian.

namespace lidarprep {

void atomic_write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

// Point record files: headerless little-endian f32 records of
// (x, y, z, intensity, ring), 20 bytes per point. Rejects truncated files and
// files containing non-finite values, reporting the bad record count.
PointCloud read_points(const std::string& path);
void write_points(const PointCloud& cloud, const std::string& path);

// Raw f32 tensor payload at `path` plus a structured-text sidecar header at
// `path + ".json"` describing shape, element type, layout, channel names, and
// the producing grid or voxel geometry.
struct TensorHeader {
  std::string kind;  // "range_image" | "range_image_batch" | "feature_map" | "voxel_features"
  std::vector<std::int64_t> shape;
  std::string dtype = "f32";
  std::string layout = "row-major, channel-last";
  std::vector<std::string> channels;
  std::optional<GridSpec> grid;
  std::optional<VoxelSpec> voxel;
  int dim_sem = 0;
  int dim_geo = 0;

  std::int64_t element_count() const;
};

void write_tensor(const std::string& path, const TensorHeader& header,
                  const std::vector<float>& payload);
std::pair<TensorHeader, std::vector<float>> read_tensor(const std::string& path);

// Channel-last (rows, cols, 5) tensor with the grid recorded in the sidecar.
// Values narrow to f32 on write; an image loaded from disk carries the five
// channels and the spec but no point maps.
void write_range_image(const RangeImage& img, const std::string& path);
RangeImage read_range_image(const std::string& path);

// (frames, rows, cols, 5) batch, one slab per frame.
void write_range_image_batch(const std::vector<RangeImage>& images, const std::string& path);

void write_feature_map(const FeatureMap& fmap, const std::string& path,
                       const std::optional<GridSpec>& grid = std::nullopt);
FeatureMap read_feature_map(const std::string& path);
std::optional<GridSpec> read_feature_map_grid(const std::string& path);

// Sparse voxel features as a (cells, 3 + dim) tensor whose first three
// columns are the integer cell coordinates.
void write_voxel_tensor(const VoxelFeatureTensor& tensor, const std::string& path);
VoxelFeatureTensor read_voxel_tensor(const std::string& path);

// Box lists: one structured-text record per line with fields
// cx, cy, cz, l, w, h, yaw, category, score.
std::vector<OrientedBox> read_boxes(const std::string& path);
void write_boxes(const std::vector<OrientedBox>& boxes, const std::string& path);

// Sweep manifest: one record per line with the frame's point file path
// (relative to the manifest), a row-major 4x4 pose-to-key matrix, and a
// timestamp in seconds. A record may carry "key": true; otherwise the last
// frame is the key.
SweepSet read_sweep_manifest(const std::string& path);

// Sample database layout: one directory per category holding the samples'
// point record files plus a samples.jsonl metadata file (box parameters,
// category, source frame, point count; one record per line). Loading walks
// categories and records in sorted order and validates every sample.
void save_gt_database(const std::vector<GtSample>& samples, const std::string& root);
std::vector<GtSample> load_gt_database(const std::string& root);

// 8-bit binary PGM (P5).
void write_pgm(const std::string& path, int rows, int cols, const std::vector<std::uint8_t>& gray);

// Affine map stored as structured text: in_dim, out_dim, row-major weight,
// bias.
AffineMap read_affine_map(const std::string& path);
void write_affine_map(const AffineMap& map, const std::string& path);

}  // namespace lidarprep

#endif  // LIDARPREP_IO_HPP_
