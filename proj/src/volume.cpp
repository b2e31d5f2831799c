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

#include "volume.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "error.hpp"
#include "random.hpp"

namespace snk {

using nlohmann::json;

std::string_view to_string(SampleType t) {
  switch (t) {
    case SampleType::U8: return "u8";
    case SampleType::U16: return "u16";
    case SampleType::F32: return "f32";
  }
  return "f32";
}

SampleType sample_type_from_string(std::string_view s) {
  if (s == "u8") return SampleType::U8;
  if (s == "u16") return SampleType::U16;
  if (s == "f32") return SampleType::F32;
  throw_config("unsupported dtype '" + std::string(s) + "' (expected u8, u16 or f32)");
}

std::size_t sample_size(SampleType t) {
  switch (t) {
    case SampleType::U8: return 1;
    case SampleType::U16: return 2;
    case SampleType::F32: return 4;
  }
  return 4;
}

ImageVolume::ImageVolume(int dim, std::array<std::size_t, 3> dims, std::array<double, 3> spacing,
                         SampleType origin)
    : dim_(dim), dims_(dims), spacing_(spacing), origin_(origin) {
  if (dim != 2 && dim != 3) throw_config("volume dimension must be 2 or 3");
  if (dim == 2) {
    dims_[2] = 1;
    spacing_[2] = 1.0;
  }
  for (int i = 0; i < 3; ++i) {
    if (dims_[i] == 0) throw_config("volume dims must be >= 1");
    if (!(spacing_[i] > 0.0)) throw_config("volume spacing must be > 0");
  }
  data_.assign(dims_[0] * dims_[1] * dims_[2], 0.0f);
}

bool ImageVolume::isotropic() const {
  for (int i = 1; i < dim_; ++i)
    if (spacing_[i] != spacing_[0]) return false;
  return true;
}

double ImageVolume::max_abs() const {
  double m = 0.0;
  for (float v : data_) m = std::max(m, static_cast<double>(std::fabs(v)));
  return m;
}

// ---------------------------------------------------------------------------
// Raw volumes

RawMeta parse_sidecar(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_io(std::string("malformed sidecar: ") + e.what());
  }
  RawMeta m;
  try {
    if (!j.contains("dims")) throw_io("malformed sidecar: missing 'dims'");
    m.dims = j.at("dims").get<std::vector<std::size_t>>();
    const std::string dtype = j.value("dtype", std::string("f32"));
    if (dtype != "u8" && dtype != "u16" && dtype != "f32")
      throw_io("malformed sidecar: unsupported dtype '" + dtype + "'");
    m.dtype = sample_type_from_string(dtype);
    if (j.contains("spacing"))
      m.spacing = j.at("spacing").get<std::vector<double>>();
    else
      m.spacing.assign(m.dims.size(), 1.0);
    const std::string order = j.value("order", std::string("x-fastest"));
    if (order != "x-fastest") throw_io("malformed sidecar: unsupported order '" + order + "'");
  } catch (const json::exception& e) {
    throw_io(std::string("malformed sidecar: ") + e.what());
  }
  if (m.dims.size() != 2 && m.dims.size() != 3)
    throw_io("malformed sidecar: 'dims' must have 2 or 3 entries");
  if (m.spacing.size() != m.dims.size())
    throw_io("malformed sidecar: 'spacing' length differs from 'dims'");
  for (std::size_t n : m.dims)
    if (n == 0) throw_io("malformed sidecar: 'dims' entries must be >= 1");
  for (double s : m.spacing)
    if (!(s > 0.0)) throw_io("malformed sidecar: 'spacing' entries must be > 0");
  return m;
}

std::string format_sidecar(const RawMeta& meta) {
  json j;
  j["dims"] = meta.dims;
  j["dtype"] = std::string(to_string(meta.dtype));
  j["spacing"] = meta.spacing;
  j["order"] = "x-fastest";
  return j.dump(2) + "\n";
}

std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  std::filesystem::path p = raw;
  return p.replace_extension(".json");
}

namespace {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_io("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

template <typename T>
T load_le(const char* p) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  return v;
}

template <typename T>
void store_le(std::ostream& out, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&v);
    std::reverse(b, b + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

std::array<std::size_t, 3> dims3(const std::vector<std::size_t>& d) {
  return {d[0], d[1], d.size() > 2 ? d[2] : 1};
}

std::array<double, 3> spacing3(const std::vector<double>& s) {
  return {s[0], s[1], s.size() > 2 ? s[2] : 1.0};
}

}  // namespace

ImageVolume load_raw(const std::filesystem::path& path, const RawMeta& meta) {
  if (meta.dims.size() != 2 && meta.dims.size() != 3) throw_io("raw volume needs 2 or 3 dims");
  ImageVolume v(static_cast<int>(meta.dims.size()), dims3(meta.dims), spacing3(meta.spacing),
                meta.dtype);
  const std::vector<char> bytes = read_file(path);
  const std::size_t expected = v.size() * sample_size(meta.dtype);
  if (bytes.size() != expected) {
    std::ostringstream msg;
    msg << "size mismatch for '" << path.string() << "': dims x dtype = " << expected
        << " bytes, file holds " << bytes.size();
    throw_io(msg.str());
  }
  auto out = v.data();
  const char* src = bytes.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (meta.dtype) {
      case SampleType::U8: out[i] = static_cast<unsigned char>(src[i]); break;
      case SampleType::U16: out[i] = load_le<std::uint16_t>(src + 2 * i); break;
      case SampleType::F32: out[i] = load_le<float>(src + 4 * i); break;
    }
  }
  return v;
}

ImageVolume load_volume(const std::filesystem::path& path,
                        const std::optional<std::vector<double>>& spacing) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  ImageVolume v;
  if (ext == ".tif" || ext == ".tiff") {
    v = load_tiff_stack(path);
  } else {
    const auto side = sidecar_path(path);
    if (!std::filesystem::exists(side)) throw_io("missing sidecar '" + side.string() + "'");
    const std::vector<char> text = read_file(side);
    v = load_raw(path, parse_sidecar(std::string_view(text.data(), text.size())));
  }
  if (spacing) {
    if (static_cast<int>(spacing->size()) != v.dim())
      throw_config("spacing override needs one value per axis");
    ImageVolume w(v.dim(), v.dims(), spacing3(*spacing), v.origin_type());
    std::copy(v.data().begin(), v.data().end(), w.data().begin());
    v = std::move(w);
  }
  return v;
}

namespace {

template <typename T>
T saturate(float x) {
  const double lo = 0.0, hi = static_cast<double>(std::numeric_limits<T>::max());
  return static_cast<T>(std::clamp(std::round(static_cast<double>(x)), lo, hi));
}

}  // namespace

void save_volume(const ImageVolume& v, const std::filesystem::path& path, SampleType dtype) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_io("cannot write '" + path.string() + "'");
  for (float x : v.data()) {
    switch (dtype) {
      case SampleType::U8: store_le<std::uint8_t>(out, saturate<std::uint8_t>(x)); break;
      case SampleType::U16: store_le<std::uint16_t>(out, saturate<std::uint16_t>(x)); break;
      case SampleType::F32: store_le<float>(out, x); break;
    }
  }
  if (!out) throw_io("failed writing '" + path.string() + "'");
  RawMeta meta;
  meta.dtype = dtype;
  for (int i = 0; i < v.dim(); ++i) {
    meta.dims.push_back(v.dims()[i]);
    meta.spacing.push_back(v.spacing()[i]);
  }
  std::ofstream side(sidecar_path(path));
  if (!side) throw_io("cannot write sidecar for '" + path.string() + "'");
  side << format_sidecar(meta);
}

// ---------------------------------------------------------------------------
// Filters

ImageVolume resample_isotropic(const ImageVolume& v, double target) {
  const int dim = v.dim();
  if (target <= 0.0) {
    target = v.spacing()[0];
    for (int i = 1; i < dim; ++i) target = std::min(target, v.spacing()[i]);
  }
  std::array<std::size_t, 3> dims{1, 1, 1};
  std::array<double, 3> scale{1, 1, 1};
  for (int i = 0; i < dim; ++i) {
    const double extent = static_cast<double>(v.dims()[i]) * v.spacing()[i];
    dims[i] = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(extent / target)));
    scale[i] = target / v.spacing()[i];
  }
  if (dims == v.dims() && v.isotropic() && v.spacing()[0] == target) return v;

  ImageVolume out(dim, dims, {target, target, target}, v.origin_type());
  auto src_coord = [&](int axis, std::size_t j) {
    return (static_cast<double>(j) + 0.5) * scale[axis] - 0.5;
  };
  for (std::size_t z = 0; z < dims[2]; ++z)
    for (std::size_t y = 0; y < dims[1]; ++y)
      for (std::size_t x = 0; x < dims[0]; ++x) {
        double value;
        if (dim == 2)
          value = v.interpolate<2>({src_coord(0, x), src_coord(1, y)});
        else
          value = v.interpolate<3>({src_coord(0, x), src_coord(1, y), src_coord(2, z)});
        out.at(x, y, z) = static_cast<float>(value);
      }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma <= 0.0) return {1.0};
  const int half = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    k[i + half] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + half];
  }
  for (double& x : k) x /= sum;
  return k;
}

ImageVolume gaussian_smooth(const ImageVolume& v, double sigma) {
  if (sigma < 0.0) throw_config("smoothing sigma must be >= 0");
  if (sigma == 0.0) return v;
  const std::vector<double> k = gaussian_kernel(sigma);
  const long half = static_cast<long>(k.size() / 2);
  ImageVolume cur = v;
  const auto& dims = v.dims();
  std::vector<double> line;
  for (int axis = 0; axis < v.dim(); ++axis) {
    ImageVolume next = cur;
    const std::size_t n = dims[axis];
    const std::size_t stride = axis == 0 ? 1 : axis == 1 ? dims[0] : dims[0] * dims[1];
    line.resize(n);
    auto src = cur.data();
    auto dst = next.data();
    for (std::size_t start = 0; start < cur.size(); ++start) {
      // Visit each line once, from the sample whose axis coordinate is 0.
      const std::size_t coord = (start / stride) % n;
      if (coord != 0) continue;
      for (std::size_t i = 0; i < n; ++i) line[i] = src[start + i * stride];
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (long t = -half; t <= half; ++t) {
          const long j = std::clamp<long>(static_cast<long>(i) + t, 0, static_cast<long>(n) - 1);
          acc += k[t + half] * line[j];
        }
        dst[start + i * stride] = static_cast<float>(acc);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

ImageVolume invert(const ImageVolume& v) {
  ImageVolume out = v;
  for (float& x : out.data()) x = -x;
  return out;
}

// ---------------------------------------------------------------------------
// Phantoms

PhantomSpec parse_phantom_spec(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw_config(std::string("phantom spec is not valid JSON: ") + e.what());
  }
  PhantomSpec s;
  auto field = [&](const char* name) -> const json& {
    if (!j.contains(name)) throw_config(std::string("phantom spec: missing field '") + name + "'");
    return j.at(name);
  };
  try {
    const auto dims = field("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 2 && dims.size() != 3)
      throw_config("phantom spec: 'dims' must have 2 or 3 entries");
    s.dim = static_cast<int>(dims.size());
    s.dims = dims3(dims);
    s.background = j.value("background", 0.0);
    s.noise_sigma = j.value("noise_sigma", 0.0);
    const std::string edge = j.value("edge", std::string("hard"));
    if (edge == "hard")
      s.edge = EdgeProfile::Hard;
    else if (edge == "gaussian")
      s.edge = EdgeProfile::Gaussian;
    else
      throw_config("phantom spec: 'edge' must be \"hard\" or \"gaussian\"");
    s.edge_sigma = j.value("edge_sigma", 1.0);
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    const json& spheres = field("spheres");
    if (!spheres.is_array()) throw_config("phantom spec: 'spheres' must be an array");
    for (std::size_t i = 0; i < spheres.size(); ++i) {
      const json& e = spheres[i];
      const std::string where = "phantom spec: spheres[" + std::to_string(i) + "]";
      if (!e.contains("center") || !e.contains("r0"))
        throw_config(where + " needs 'center' and 'r0'");
      const auto c = e.at("center").get<std::vector<double>>();
      if (static_cast<int>(c.size()) != s.dim)
        throw_config(where + ".center must have " + std::to_string(s.dim) + " entries");
      PhantomSphere sp;
      for (int a = 0; a < s.dim; ++a) sp.center[a] = c[a];
      sp.r0 = e.at("r0").get<double>();
      sp.amplitude = e.value("amplitude", 1.0);
      s.spheres.push_back(sp);
    }
  } catch (const json::exception& e) {
    throw_config(std::string("phantom spec: ") + e.what());
  }
  validate(s);
  return s;
}

std::string format_phantom_spec(const PhantomSpec& s) {
  json j;
  j["dims"] = std::vector<std::size_t>(s.dims.begin(), s.dims.begin() + s.dim);
  j["background"] = s.background;
  j["noise_sigma"] = s.noise_sigma;
  j["edge"] = s.edge == EdgeProfile::Hard ? "hard" : "gaussian";
  j["edge_sigma"] = s.edge_sigma;
  if (s.seed) j["seed"] = *s.seed;
  j["spheres"] = json::array();
  for (const auto& sp : s.spheres) {
    j["spheres"].push_back({{"center", std::vector<double>(sp.center.begin(), sp.center.begin() + s.dim)},
                            {"r0", sp.r0},
                            {"amplitude", sp.amplitude}});
  }
  return j.dump(2) + "\n";
}

void validate(const PhantomSpec& s) {
  if (s.dim != 2 && s.dim != 3) throw_config("phantom spec: 'dims' must have 2 or 3 entries");
  for (int a = 0; a < s.dim; ++a)
    if (s.dims[a] == 0) throw_config("phantom spec: 'dims' entries must be >= 1");
  if (!(s.noise_sigma >= 0.0)) throw_config("phantom spec: 'noise_sigma' must be >= 0");
  if (s.edge == EdgeProfile::Gaussian && !(s.edge_sigma > 0.0))
    throw_config("phantom spec: 'edge_sigma' must be > 0");
  for (std::size_t i = 0; i < s.spheres.size(); ++i) {
    const auto& sp = s.spheres[i];
    const std::string where = "phantom spec: spheres[" + std::to_string(i) + "]";
    if (!(sp.r0 > 0.0)) throw_config(where + ".r0 must be > 0");
    if (!(sp.amplitude > 0.0)) throw_config(where + ".amplitude must be > 0");
    for (int a = 0; a < s.dim; ++a) {
      const double hi = static_cast<double>(s.dims[a]) - 1.0;
      if (sp.center[a] - sp.r0 < 0.0 || sp.center[a] + sp.r0 > hi)
        throw_config(where + " does not fit inside dims");
    }
  }
}

Phantom make_phantom(const PhantomSpec& spec, std::uint64_t seed) {
  validate(spec);
  Phantom ph;
  ph.volume = ImageVolume(spec.dim, spec.dims);
  ph.truth = spec.spheres;
  auto data = ph.volume.data();
  std::fill(data.begin(), data.end(), 0.0f);

  for (std::size_t i = 0; i < spec.spheres.size(); ++i)
    for (std::size_t j = i + 1; j < spec.spheres.size(); ++j) {
      const auto& a = spec.spheres[i];
      const auto& b = spec.spheres[j];
      double d2 = 0.0;
      for (int k = 0; k < spec.dim; ++k) d2 += (a.center[k] - b.center[k]) * (a.center[k] - b.center[k]);
      if (std::sqrt(d2) < a.r0 + b.r0)
        ph.warnings.push_back("spheres " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
    }

  // Foreground as the maximum over spheres, then background and noise.
  const auto& dims = spec.dims;
  const double reach_pad = spec.edge == EdgeProfile::Gaussian ? 6.0 * spec.edge_sigma : 0.0;
  for (const auto& sp : spec.spheres) {
    const double reach = sp.r0 + reach_pad;
    std::array<std::size_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      if (a >= spec.dim) continue;
      lo[a] = static_cast<std::size_t>(std::max(0.0, std::floor(sp.center[a] - reach)));
      hi[a] = static_cast<std::size_t>(std::min(static_cast<double>(dims[a] - 1), std::ceil(sp.center[a] + reach)));
    }
    for (std::size_t z = lo[2]; z <= hi[2]; ++z)
      for (std::size_t y = lo[1]; y <= hi[1]; ++y)
        for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
          const double dx = x - sp.center[0], dy = y - sp.center[1];
          const double dz = spec.dim == 3 ? z - sp.center[2] : 0.0;
          const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
          double value;
          if (spec.edge == EdgeProfile::Hard)
            value = r < sp.r0 ? sp.amplitude : 0.0;
          else
            value = sp.amplitude * 0.5 * std::erfc((r - sp.r0) / (spec.edge_sigma * std::sqrt(2.0)));
          float& dst = ph.volume.at(x, y, z);
          dst = std::max(dst, static_cast<float>(value));
        }
  }

  const StreamKey noise_key{seed, 0xFFFFFFFFu, 0};
  for (std::size_t i = 0; i < data.size(); ++i) {
    double value = spec.background + data[i];
    if (spec.noise_sigma > 0.0) {
      const auto w = noise_key.block(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32));
      value += spec.noise_sigma * box_muller(w[0], w[1])[0];
    }
    data[i] = static_cast<float>(value);
  }
  return ph;
}

}  // namespace snk
