/*
 * snakuscule - swarms of concentric active contours for blob localization
 *
 * Copyright 2026 The snakuscule authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SNK_VOLUME_HPP
#define SNK_VOLUME_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geometry.hpp"
#include "vec.hpp"

namespace snk {

enum class SampleType : std::uint8_t { U8, U16, F32 };

std::string_view to_string(SampleType t);
SampleType sample_type_from_string(std::string_view s);
std::size_t sample_size(SampleType t);

/// Scalar image in 2 or 3 dimensions, x fastest. 2D images keep nz == 1.
/// Samples are floats in their original units; coordinates are voxel
/// indices with voxel centres on integers.
class ImageVolume {
 public:
  ImageVolume() = default;
  ImageVolume(int dim, std::array<std::size_t, 3> dims, std::array<double, 3> spacing = {1, 1, 1},
              SampleType origin = SampleType::F32);

  int dim() const { return dim_; }
  const std::array<std::size_t, 3>& dims() const { return dims_; }
  const std::array<double, 3>& spacing() const { return spacing_; }
  SampleType origin_type() const { return origin_; }
  void set_origin_type(SampleType t) { origin_ = t; }
  std::size_t size() const { return data_.size(); }
  bool isotropic() const;

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  std::size_t index(std::size_t x, std::size_t y, std::size_t z = 0) const {
    return x + dims_[0] * (y + dims_[1] * z);
  }
  float& at(std::size_t x, std::size_t y, std::size_t z = 0) { return data_[index(x, y, z)]; }
  float at(std::size_t x, std::size_t y, std::size_t z = 0) const { return data_[index(x, y, z)]; }

  /// Largest absolute sample value.
  double max_abs() const;

  /// Voxel-centre domain [0, n-1] along each axis.
  template <int D>
  Box<D> domain() const {
    Box<D> b;
    for (int i = 0; i < D; ++i) b.hi[i] = static_cast<double>(dims_[i]) - 1.0;
    return b;
  }

  /// d-linear interpolation with clamp-to-edge outside the volume.
  template <int D>
  double interpolate(const Vec<D>& x) const;

 private:
  int dim_ = 3;
  std::array<std::size_t, 3> dims_{1, 1, 1};
  std::array<double, 3> spacing_{1, 1, 1};
  SampleType origin_ = SampleType::F32;
  std::vector<float> data_;
};

template <int D>
double ImageVolume::interpolate(const Vec<D>& x) const {
  std::array<std::size_t, D> i0{};
  std::array<std::size_t, D> i1{};
  std::array<double, D> t{};
  for (int a = 0; a < D; ++a) {
    const double hi = static_cast<double>(dims_[a] - 1);
    const double c = std::clamp(x[a], 0.0, hi);
    const double f = std::floor(c);
    i0[a] = static_cast<std::size_t>(f);
    i1[a] = std::min(i0[a] + 1, dims_[a] - 1);
    t[a] = c - f;
  }
  if constexpr (D == 2) {
    const double v00 = data_[i0[0] + dims_[0] * i0[1]];
    const double v10 = data_[i1[0] + dims_[0] * i0[1]];
    const double v01 = data_[i0[0] + dims_[0] * i1[1]];
    const double v11 = data_[i1[0] + dims_[0] * i1[1]];
    const double a = v00 + t[0] * (v10 - v00);
    const double b = v01 + t[0] * (v11 - v01);
    return a + t[1] * (b - a);
  } else {
    const std::size_t sx = 1, sy = dims_[0], sz = dims_[0] * dims_[1];
    auto v = [&](std::size_t x0, std::size_t y0, std::size_t z0) -> double {
      return data_[x0 * sx + y0 * sy + z0 * sz];
    };
    const double c00 = v(i0[0], i0[1], i0[2]) + t[0] * (v(i1[0], i0[1], i0[2]) - v(i0[0], i0[1], i0[2]));
    const double c10 = v(i0[0], i1[1], i0[2]) + t[0] * (v(i1[0], i1[1], i0[2]) - v(i0[0], i1[1], i0[2]));
    const double c01 = v(i0[0], i0[1], i1[2]) + t[0] * (v(i1[0], i0[1], i1[2]) - v(i0[0], i0[1], i1[2]));
    const double c11 = v(i0[0], i1[1], i1[2]) + t[0] * (v(i1[0], i1[1], i1[2]) - v(i0[0], i1[1], i1[2]));
    const double c0 = c00 + t[1] * (c10 - c00);
    const double c1 = c01 + t[1] * (c11 - c01);
    return c0 + t[2] * (c1 - c0);
  }
}

/// Layout of a raw volume file. Samples are little endian, x fastest.
struct RawMeta {
  std::vector<std::size_t> dims;
  SampleType dtype = SampleType::F32;
  std::vector<double> spacing;
};

/// Parses a JSON sidecar: {"dims": [...], "dtype": "u8"|"u16"|"f32",
/// "spacing": [...], "order": "x-fastest"}.
RawMeta parse_sidecar(std::string_view json_text);
std::string format_sidecar(const RawMeta& meta);

/// Sidecar path for a raw volume: the same path with a .json extension.
std::filesystem::path sidecar_path(const std::filesystem::path& raw);

ImageVolume load_raw(const std::filesystem::path& path, const RawMeta& meta);

/// Loads a raw volume described by its sidecar, or a TIFF stack when the
/// extension is .tif/.tiff. `spacing` overrides the stored spacing.
ImageVolume load_volume(const std::filesystem::path& path,
                        const std::optional<std::vector<double>>& spacing = std::nullopt);

/// Writes samples and sidecar. Integer types are rounded and saturated.
void save_volume(const ImageVolume& v, const std::filesystem::path& path,
                 SampleType dtype = SampleType::F32);

/// Multi-page grayscale TIFF, one page per z slice, 8 or 16 bit, uncompressed.
ImageVolume load_tiff_stack(const std::filesystem::path& path);
void save_tiff_stack(const ImageVolume& v, const std::filesystem::path& path, SampleType dtype);

/// Resamples to equal spacing on every axis (default: the finest input
/// spacing). Output sample j along an axis sits at physical position
/// (j + 1/2) * target, so the physical extent n * spacing is preserved.
ImageVolume resample_isotropic(const ImageVolume& v, double target_spacing = 0.0);

/// Separable Gaussian filter truncated at 4 sigma, edge samples replicated.
ImageVolume gaussian_smooth(const ImageVolume& v, double sigma);

/// Normalized 1D Gaussian kernel of half-width ceil(4 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Negated copy, for dark blobs on a bright background.
ImageVolume invert(const ImageVolume& v);

enum class EdgeProfile : std::uint8_t { Hard, Gaussian };

struct PhantomSphere {
  std::array<double, 3> center{};
  double r0 = 0.0;
  double amplitude = 1.0;
};

struct PhantomSpec {
  int dim = 3;
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::vector<PhantomSphere> spheres;
  double background = 0.0;
  double noise_sigma = 0.0;
  EdgeProfile edge = EdgeProfile::Hard;
  double edge_sigma = 1.0;
  std::optional<std::uint64_t> seed;
};

/// Parses and validates a phantom description; errors name the field.
PhantomSpec parse_phantom_spec(std::string_view json_text);
std::string format_phantom_spec(const PhantomSpec& spec);

/// Throws a config error naming the offending field or sphere index.
void validate(const PhantomSpec& spec);

struct Phantom {
  ImageVolume volume;
  std::vector<PhantomSphere> truth;
  std::vector<std::string> warnings;
};

/// Renders bright spheres over a constant background with optional Gaussian
/// edges and additive Gaussian noise. Hard spheres cover r < r0.
Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed);

}  // namespace snk

#endif  // SNK_VOLUME_HPP
