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

#include "geometry.hpp"

#include <cmath>
#include <sstream>

#include "error.hpp"

namespace snk {
namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }
double smoothstep_slope(double t) { return 6.0 * t * (1.0 - t); }

/// Value and slope of a 0 -> 1 transition centred at c with width w.
/// A zero width degenerates to a unit step at c.
std::pair<double, double> ramp(double r, double c, double w) {
  if (w == 0.0) return {r >= c ? 1.0 : 0.0, 0.0};
  const double t = (r - c) / w + 0.5;
  if (t <= 0.0) return {0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0};
  return {smoothstep(t), smoothstep_slope(t) / w};
}

double ipow(double x, int d) { return d == 2 ? x * x : x * x * x; }

/// Integral of ramp(r) r^(d-1) over [0, upper]. The ramp segment is a
/// polynomial of degree at most 5, which 3-point Gauss-Legendre integrates
/// exactly.
double ramp_moment(double c, double w, double upper, int d) {
  double total = (ipow(upper, d) - ipow(c + 0.5 * w, d)) / d;
  if (w > 0.0) {
    static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double r = c + 0.5 * w * kNodes[i];
      s += kWeights[i] * ramp(r, c, w).first * ipow(r, d) / r;
    }
    total += 0.5 * w * s;
  }
  return total;
}

double balance_gain(int d, double inner_c, double inner_w, double outer_c, double outer_w) {
  const double upper = outer_c + 0.5 * outer_w;
  const double j_inner = ramp_moment(inner_c, inner_w, upper, d);
  const double j_outer = ramp_moment(outer_c, outer_w, upper, d);
  const double denom = j_inner - j_outer;
  if (!(denom > 0.0)) throw DegenerateContour("radial weight has an empty shell");
  return (ipow(upper, d) / d - j_inner) / denom;
}

}  // namespace

double ContourProfile::rho() const { return std::pow(2.0, -1.0 / dim); }

double ContourProfile::outer_ramp(double radius) const {
  return mode == RampMode::Proportional ? outer_width * radius : outer_width;
}

double ContourProfile::inner_ramp(double radius) const {
  return outer_ramp(radius) * rho();
}

RadialWeight::RadialWeight(const ContourProfile& profile, double radius)
    : dim_(profile.dim),
      mode_(profile.mode),
      radius_(radius),
      rho_(profile.rho()),
      inner_c_(rho_ * radius),
      inner_w_(profile.inner_ramp(radius)),
      outer_c_(radius),
      outer_w_(profile.outer_ramp(radius)),
      support_(profile.support(radius)),
      gain_(1.0),
      gain_slope_(0.0) {
  if (dim_ != 2 && dim_ != 3) throw_config("profile dimension must be 2 or 3");
  if (!(radius > 0.0) || !(profile.outer_width >= 0.0))
    throw DegenerateContour("radial weight needs a positive radius and non-negative width");
  if (inner_c_ + 0.5 * inner_w_ >= outer_c_ - 0.5 * outer_w_ || inner_c_ - 0.5 * inner_w_ <= 0.0) {
    std::ostringstream msg;
    msg << "contour radius " << radius << " is too small for ramp widths " << inner_w_
        << " and " << outer_w_;
    throw DegenerateContour(msg.str());
  }
  gain_ = balance_gain(dim_, inner_c_, inner_w_, outer_c_, outer_w_);
  if (mode_ == RampMode::FixedVoxels && outer_w_ > 0.0) {
    // The gain drifts with R when the widths stay fixed; its slope enters dS/dR.
    const double h = 1e-5 * radius;
    auto gain_at = [&](double rr) {
      return balance_gain(dim_, rho_ * rr, inner_w_, rr, outer_w_);
    };
    gain_slope_ = (gain_at(radius + h) - gain_at(radius - h)) / (2.0 * h);
  }
}

WeightSample RadialWeight::operator()(double r) const {
  if (r >= support_) return {};
  const auto [h_in, s_in] = ramp(r, inner_c_, inner_w_);
  const auto [h_out, s_out] = ramp(r, outer_c_, outer_w_);
  WeightSample w;
  w.value = -1.0 + (1.0 + gain_) * h_in - gain_ * h_out;
  w.d_r = (1.0 + gain_) * s_in - gain_ * s_out;
  if (mode_ == RampMode::Proportional) {
    w.d_R = -(r / radius_) * w.d_r;
  } else {
    w.d_R = -rho_ * (1.0 + gain_) * s_in + gain_ * s_out + gain_slope_ * (h_in - h_out);
  }
  return w;
}

LobeSample RadialWeight::lobes(double r) const {
  if (r >= support_) return {};
  const auto [h_in, s_in] = ramp(r, inner_c_, inner_w_);
  const auto [h_out, s_out] = ramp(r, outer_c_, outer_w_);
  LobeSample l;
  l.neg = {h_in - 1.0, s_in, 0.0};
  l.pos = {h_in - h_out, s_in - s_out, 0.0};
  if (mode_ == RampMode::Proportional) {
    l.neg.d_R = -(r / radius_) * l.neg.d_r;
    l.pos.d_R = -(r / radius_) * l.pos.d_r;
  } else {
    l.neg.d_R = -rho_ * s_in;
    l.pos.d_R = -rho_ * s_in + s_out;
  }
  return l;
}

double weight(const ContourProfile& profile, double r, double radius) {
  return RadialWeight(profile, radius).value(r);
}

double moment_balance(const ContourProfile& profile, double radius) {
  return RadialWeight(profile, radius).gain();
}

template <int D>
std::pair<Vec<D>, Vec<D>> weight_partials(const RadialWeight& w, const Vec<D>& k,
                                          const Vec<D>& p, const Vec<D>& q) {
  const Vec<D> c = 0.5 * (p + q);
  const Vec<D> offset = k - c;
  const double r = norm<D>(offset);
  const WeightSample s = w(r);
  Vec<D> dp{};
  if (r > 0.0) dp = (-0.5 * s.d_r / r) * offset;
  Vec<D> dq = dp;
  dp[0] -= 0.5 * s.d_R;
  dq[0] += 0.5 * s.d_R;
  return {dp, dq};
}

int lattice_count(double extent, double r0, const ContourProfile& profile) {
  const double room = extent - 2.0 * profile.support(r0);
  if (room < 0.0) return 0;
  const double spacing = std::sqrt(1.5) * r0;
  return static_cast<int>(std::floor(room / spacing + 1e-12)) + 1;
}

template <int D>
std::vector<Snake<D>> lattice_init(const Box<D>& domain, double r0,
                                   const ContourProfile& profile) {
  if (!(r0 > 0.0)) throw_config("initial radius must be positive");
  const double spacing = std::sqrt(1.5) * r0;
  const double margin = profile.support(r0);

  std::array<int, D> count{};
  std::array<double, D> start{};
  std::size_t total = 1;
  for (int i = 0; i < D; ++i) {
    const double extent = domain.hi[i] - domain.lo[i];
    count[i] = lattice_count(extent, r0, profile);
    if (count[i] == 0) return {};
    const double used = (count[i] - 1) * spacing;
    start[i] = domain.lo[i] + margin + 0.5 * (extent - 2.0 * margin - used);
    total *= static_cast<std::size_t>(count[i]);
  }

  // x varies fastest; the list index is the contour id.
  std::vector<Snake<D>> out;
  out.reserve(total);
  std::array<int, D> idx{};
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rem = n;
    for (int i = 0; i < D; ++i) {
      idx[i] = static_cast<int>(rem % static_cast<std::size_t>(count[i]));
      rem /= static_cast<std::size_t>(count[i]);
    }
    Vec<D> c{};
    for (int i = 0; i < D; ++i) c[i] = start[i] + idx[i] * spacing;
    out.push_back(Snake<D>::from_center(c, r0));
  }
  return out;
}

template std::pair<Vec<2>, Vec<2>> weight_partials<2>(const RadialWeight&, const Vec<2>&,
                                                      const Vec<2>&, const Vec<2>&);
template std::pair<Vec<3>, Vec<3>> weight_partials<3>(const RadialWeight&, const Vec<3>&,
                                                      const Vec<3>&, const Vec<3>&);
template std::vector<Snake<2>> lattice_init<2>(const Box<2>&, double, const ContourProfile&);
template std::vector<Snake<3>> lattice_init<3>(const Box<3>&, double, const ContourProfile&);

}  // namespace snk
