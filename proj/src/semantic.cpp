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

#include "lidarprep/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lidarprep/parallel.hpp"

namespace lidarprep {

namespace {

// Neighborhood sampling convention: elevation rows clamp at the borders,
// azimuth columns wrap only when the grid covers the full circle. With this
// choice a constant fully occupied image has zero gradients everywhere,
// including the border pixels.
double sample_range(const RangeImage& img, bool wrap_cols, int row, int col) {
  row = std::clamp(row, 0, img.rows - 1);
  if (wrap_cols) {
    col = ((col % img.cols) + img.cols) % img.cols;
  } else {
    col = std::clamp(col, 0, img.cols - 1);
  }
  const std::size_t p = img.at(row, col);
  return img.mask[p] != 0.0 ? img.range[p] : 0.0;
}

double positional_encoding(int row, int col, int slot, int count) {
  const int band = slot / 4;
  const double omega = std::pow(10000.0, -4.0 * band / count);
  const double pos = (slot % 4 < 2) ? static_cast<double>(row) : static_cast<double>(col);
  const double angle = pos * omega;
  return (slot % 2 == 0) ? std::sin(angle) : std::cos(angle);
}

void fill_pixel_features(const RangeImage& img, bool wrap_cols, int dim, int row, int col,
                         double* out) {
  const std::size_t p = img.at(row, col);
  double fixed[9];
  fixed[0] = img.range[p];
  fixed[1] = img.height[p];
  fixed[2] = img.elevation[p];
  fixed[3] = img.reflectance[p];
  fixed[4] = img.mask[p];

  double sum = 0.0;
  double samples[9];
  int k = 0;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      samples[k] = sample_range(img, wrap_cols, row + dr, col + dc);
      sum += samples[k];
      ++k;
    }
  }
  const double mean = sum / 9.0;
  double varsum = 0.0;
  for (int i = 0; i < 9; ++i) {
    const double d = samples[i] - mean;
    varsum += d * d;
  }
  fixed[5] = mean;
  fixed[6] = std::sqrt(varsum / 9.0);
  fixed[7] = (sample_range(img, wrap_cols, row, col + 1) -
              sample_range(img, wrap_cols, row, col - 1)) / 2.0;
  fixed[8] = (sample_range(img, wrap_cols, row + 1, col) -
              sample_range(img, wrap_cols, row - 1, col)) / 2.0;

  const int nfixed = std::min(dim, 9);
  for (int i = 0; i < nfixed; ++i) out[i] = fixed[i];
  const int npos = dim - nfixed;
  for (int i = 0; i < npos; ++i) out[nfixed + i] = positional_encoding(row, col, i, npos);
}

FeatureMap make_map(const RangeImage& img, int dim) {
  if (dim < kMinFeatureDim) {
    throw std::invalid_argument("features: dimensionality must be at least 8");
  }
  FeatureMap fmap;
  fmap.rows = img.rows;
  fmap.cols = img.cols;
  fmap.dim = dim;
  fmap.values.assign(static_cast<std::size_t>(img.rows) * img.cols * dim, 0.0);
  return fmap;
}

}  // namespace

FeatureMap extract_reference_features(const RangeImage& img, int dim) {
  FeatureMap fmap = make_map(img, dim);
  const bool wrap = img.spec.full_circle();
  const std::int64_t npix = static_cast<std::int64_t>(img.pixel_count());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t p = 0; p < npix; ++p) {
    const int row = static_cast<int>(p / img.cols);
    const int col = static_cast<int>(p % img.cols);
    fill_pixel_features(img, wrap, dim, row, col, fmap.values.data() + fmap.at(row, col));
  }
  return fmap;
}

FeatureMap extract_reference_features_serial(const RangeImage& img, int dim) {
  FeatureMap fmap = make_map(img, dim);
  const bool wrap = img.spec.full_circle();
  for (int row = 0; row < img.rows; ++row) {
    for (int col = 0; col < img.cols; ++col) {
      fill_pixel_features(img, wrap, dim, row, col, fmap.values.data() + fmap.at(row, col));
    }
  }
  return fmap;
}

FeatureMatrix sample_point_features(const FeatureMap& fmap, const RangeImage& img) {
  if (fmap.rows != img.rows || fmap.cols != img.cols) {
    throw std::invalid_argument("features: map dimensions do not match the image raster");
  }
  FeatureMatrix out;
  out.count = static_cast<std::int64_t>(img.point_to_pixel.size());
  out.dim = fmap.dim;
  out.values.assign(static_cast<std::size_t>(out.count) * fmap.dim, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t i = 0; i < out.count; ++i) {
    const PointPixel& pp = img.point_to_pixel[i];
    if (!pp.survived()) continue;
    const double* src = fmap.values.data() + fmap.at(pp.row, pp.col);
    std::copy(src, src + fmap.dim, out.values.data() + out.at(i));
  }
  return out;
}

}  // namespace lidarprep
