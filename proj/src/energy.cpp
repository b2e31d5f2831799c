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

#include "energy.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"
#include "parallel.hpp"
#include "sampler.hpp"

namespace snk {
namespace {

/// Partial sums over a set of sample points:
///   s_i    = sum S I
///   radial = sum (dS/dr) I (k - c) / r
///   scale  = sum (dS/dR) I
template <int D>
struct Moments {
  double s_i = 0.0;
  Vec<D> radial{};
  double scale = 0.0;
  std::size_t count = 0;

  void add(const RadialWeight& w, const Vec<D>& offset, double r, double intensity) {
    const WeightSample s = w(r);
    s_i += s.value * intensity;
    if (r > 0.0) {
      const double f = s.d_r * intensity / r;
      for (int i = 0; i < D; ++i) radial[i] += f * offset[i];
    }
    scale += s.d_R * intensity;
    ++count;
  }

  Moments& operator+=(const Moments& o) {
    s_i += o.s_i;
    for (int i = 0; i < D; ++i) radial[i] += o.radial[i];
    scale += o.scale;
    count += o.count;
    return *this;
  }
};

/// Partial sums for the grid integrator, kept per lobe and both with and
/// without intensity so the shell gain can be fixed on the sampling lattice
/// once the whole footprint has been visited.
template <int D>
struct LobeMoments {
  // [lobe][0: weighted by intensity, 1: geometry only]
  double value[2][2] = {};
  Vec<D> radial[2][2] = {};
  double scale[2][2] = {};
  std::size_t count = 0;

  void add(const RadialWeight& w, const Vec<D>& offset, double r, double intensity) {
    const LobeSample l = w.lobes(r);
    const WeightSample* lobe[2] = {&l.neg, &l.pos};
    const double inv_r = r > 0.0 ? 1.0 / r : 0.0;
    for (int k = 0; k < 2; ++k) {
      const WeightSample& s = *lobe[k];
      const double f = s.d_r * inv_r;
      value[k][0] += s.value * intensity;
      value[k][1] += s.value;
      scale[k][0] += s.d_R * intensity;
      scale[k][1] += s.d_R;
      for (int i = 0; i < D; ++i) {
        radial[k][0][i] += f * intensity * offset[i];
        radial[k][1][i] += f * offset[i];
      }
    }
    ++count;
  }

  LobeMoments& operator+=(const LobeMoments& o) {
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j) {
        value[k][j] += o.value[k][j];
        scale[k][j] += o.scale[k][j];
        for (int i = 0; i < D; ++i) radial[k][j][i] += o.radial[k][j][i];
      }
    count += o.count;
    return *this;
  }

  /// Collapses to plain moments with the gain g = -sum(neg) / sum(pos), so
  /// that a constant image has zero energy for every pose. The gain depends
  /// on the pose; differentiating it replaces I by I - beta in the gradient
  /// sums, beta = sum(pos I) / sum(pos).
  Moments<D> balance() const {
    Moments<D> m;
    m.count = count;
    if (!(value[1][1] > 0.0)) throw DegenerateContour("contour shell holds no grid points");
    const double g = -value[0][1] / value[1][1];
    const double beta = value[1][0] / value[1][1];
    m.s_i = value[0][0] + g * value[1][0];
    m.scale = (scale[0][0] + g * scale[1][0]) - beta * (scale[0][1] + g * scale[1][1]);
    for (int i = 0; i < D; ++i)
      m.radial[i] = (radial[0][0][i] + g * radial[1][0][i]) - beta * (radial[0][1][i] + g * radial[1][1][i]);
    return m;
  }

  /// Plain moments with a fixed gain (the continuous balance).
  Moments<D> fixed_gain(double g, double g_slope) const {
    Moments<D> m;
    m.count = count;
    m.s_i = value[0][0] + g * value[1][0];
    m.scale = scale[0][0] + g * scale[1][0] + g_slope * value[1][0];
    for (int i = 0; i < D; ++i) m.radial[i] = radial[0][0][i] + g * radial[1][0][i];
    return m;
  }
};

/// Computes every chunk, then combines neighbours pairwise in a fixed tree.
template <typename M, typename ChunkFn>
M reduce_chunks(std::size_t n_chunks, ChunkFn&& chunk, ThreadPool* pool) {
  std::vector<M> parts(n_chunks);
  if (pool != nullptr && n_chunks > 1)
    pool->parallel_for(n_chunks, [&](std::size_t i) { parts[i] = chunk(i); });
  else
    for (std::size_t i = 0; i < n_chunks; ++i) parts[i] = chunk(i);
  if (parts.empty()) return {};
  for (std::size_t width = 1; width < parts.size(); width *= 2)
    for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) parts[i] += parts[i + width];
  return parts.front();
}

template <int D>
RadialWeight check_pose(const ImageVolume& img, const Snake<D>& s, const ContourProfile& profile,
                        const EnergyOptions& opts) {
  if (img.dim() != D) throw_config("image dimension does not match contour dimension");
  if (profile.dim != D) throw_config("profile dimension does not match contour dimension");
  if (!(s.extent() >= opts.min_extent)) {
    std::ostringstream msg;
    msg << "contour extent " << s.extent() << " is below the minimum " << opts.min_extent;
    throw DegenerateContour(msg.str());
  }
  RadialWeight w(profile, s.radius());
  const Vec<D> c = s.center();
  constexpr double kSlack = 1e-9;
  for (int i = 0; i < D; ++i) {
    const double hi = static_cast<double>(img.dims()[i]) - 1.0;
    if (c[i] - w.support() < -kSlack || c[i] + w.support() > hi + kSlack) {
      std::ostringstream msg;
      msg << "contour footprint leaves the image along axis " << i;
      throw DegenerateContour(msg.str());
    }
  }
  return w;
}

template <int D>
EnergyReport<D> assemble(const Snake<D>& s, Moments<D> m, double measure) {
  m.s_i *= measure;
  m.scale *= measure;
  for (int i = 0; i < D; ++i) m.radial[i] *= measure;

  const double ext = s.extent();
  const double gamma = 1.0 / std::pow(ext, D);
  EnergyReport<D> rep;
  rep.e_raw = m.s_i;
  rep.e_norm = gamma * m.s_i;
  rep.n_samples = m.count;
  // d/dp of gamma contributes +d/ext; the radius moves by -1/2 with p_x and
  // +1/2 with q_x; every sample radius moves by -(k - c)/(2r) with either.
  rep.grad_p[0] = gamma * (D / ext * m.s_i - 0.5 * m.radial[0] - 0.5 * m.scale);
  rep.grad_q[0] = gamma * (-D / ext * m.s_i - 0.5 * m.radial[0] + 0.5 * m.scale);
  for (int i = 1; i < D; ++i) {
    rep.grad_p[i] = gamma * (-0.5 * m.radial[i]);
    rep.grad_q[i] = rep.grad_p[i];
  }
  return rep;
}

}  // namespace

template <int D>
EnergyReport<D> energy_grid(const ImageVolume& img, const Snake<D>& s, const ContourProfile& profile,
                            const EnergyOptions& opts) {
  const RadialWeight w = check_pose(img, s, profile, opts);
  const Vec<D> c = s.center();
  const double support = w.support();
  const double support2 = support * support;

  // One chunk per slab of the slowest axis.
  constexpr int outer = D - 1;
  const long lo = static_cast<long>(std::ceil(c[outer] - support));
  const long hi = static_cast<long>(std::floor(c[outer] + support));
  const std::size_t n_chunks = hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;

  auto chunk = [&](std::size_t slab) {
    LobeMoments<D> m;
    const long o = lo + static_cast<long>(slab);
    const double d_outer = static_cast<double>(o) - c[outer];
    const double rem_outer = support2 - d_outer * d_outer;
    if (rem_outer <= 0.0) return m;
    auto row = [&](long y, long z, double rem) {
      const double half = std::sqrt(rem);
      const long x0 = static_cast<long>(std::ceil(c[0] - half));
      const long x1 = static_cast<long>(std::floor(c[0] + half));
      for (long x = x0; x <= x1; ++x) {
        Vec<D> off{};
        off[0] = static_cast<double>(x) - c[0];
        if constexpr (D == 2) {
          off[1] = d_outer;
        } else {
          off[1] = static_cast<double>(y) - c[1];
          off[2] = d_outer;
        }
        const double r2 = dot<D>(off, off);
        if (r2 >= support2) continue;
        m.add(w, off, std::sqrt(r2), img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                                            static_cast<std::size_t>(z)));
      }
    };
    if constexpr (D == 2) {
      row(o, 0, rem_outer);
    } else {
      const double half_y = std::sqrt(rem_outer);
      const long y0 = static_cast<long>(std::ceil(c[1] - half_y));
      const long y1 = static_cast<long>(std::floor(c[1] + half_y));
      for (long y = y0; y <= y1; ++y) {
        const double dy = static_cast<double>(y) - c[1];
        const double rem = rem_outer - dy * dy;
        if (rem > 0.0) row(y, o, rem);
      }
    }
    return m;
  };
  const LobeMoments<D> m = reduce_chunks<LobeMoments<D>>(n_chunks, chunk, opts.pool);
  return assemble<D>(s, opts.lattice_balance ? m.balance() : m.fixed_gain(w.gain(), w.gain_slope()), 1.0);
}

template <int D>
EnergyReport<D> energy_mc(const ImageVolume& img, const Snake<D>& s, const ContourProfile& profile,
                          int n, const StreamKey& key, const EnergyOptions& opts) {
  if (n < 1) throw_config("Monte-Carlo integration needs at least one sample");
  const RadialWeight w = check_pose(img, s, profile, opts);
  const Vec<D> c = s.center();
  const double support = w.support();
  const std::size_t total = static_cast<std::size_t>(n);
  const std::size_t n_chunks = (total + kSampleChunk - 1) / kSampleChunk;

  auto chunk = [&](std::size_t ci) {
    Moments<D> m;
    const std::size_t end = std::min(total, (ci + 1) * kSampleChunk);
    for (std::size_t i = ci * kSampleChunk; i < end; ++i) {
      const Vec<D> off = uniform_sample<D>(support, key, static_cast<std::uint32_t>(i));
      const double r = norm<D>(off);
      m.add(w, off, r, img.interpolate<D>(c + off));
    }
    return m;
  };
  Moments<D> m = reduce_chunks<Moments<D>>(n_chunks, chunk, opts.pool);
  return assemble<D>(s, m, ball_measure(D, support) / n);
}

double analytic_blob_energy(double radius, double r0, int dim) {
  const double unit = ball_measure(dim, 1.0);
  if (radius <= r0) return 0.0;
  if (radius < std::pow(2.0, 1.0 / dim) * r0)
    return -2.0 * unit * (std::pow(radius, dim) - std::pow(r0, dim));
  return -2.0 * unit * std::pow(r0, dim);
}

std::vector<double> normalized_energy_curve(double r0, std::span<const double> radii, int dim) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) out.push_back(analytic_blob_energy(r, r0, dim) / std::pow(r, dim));
  return out;
}

template EnergyReport<2> energy_grid<2>(const ImageVolume&, const Snake<2>&, const ContourProfile&,
                                        const EnergyOptions&);
template EnergyReport<3> energy_grid<3>(const ImageVolume&, const Snake<3>&, const ContourProfile&,
                                        const EnergyOptions&);
template EnergyReport<2> energy_mc<2>(const ImageVolume&, const Snake<2>&, const ContourProfile&, int,
                                      const StreamKey&, const EnergyOptions&);
template EnergyReport<3> energy_mc<3>(const ImageVolume&, const Snake<3>&, const ContourProfile&, int,
                                      const StreamKey&, const EnergyOptions&);

}  // namespace snk
