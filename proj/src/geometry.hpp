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

#ifndef SNK_GEOMETRY_HPP
#define SNK_GEOMETRY_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "vec.hpp"

namespace snk {

/// A contour defined by two identifier points p and q spanning a diameter.
/// The points share every coordinate except x, with q to the right of p.
template <int D>
struct Snake {
  Vec<D> p{};
  Vec<D> q{};

  static Snake from_center(const Vec<D>& center, double radius) {
    Snake s;
    s.p = center;
    s.q = center;
    s.p[0] -= radius;
    s.q[0] += radius;
    return s;
  }

  double radius() const { return 0.5 * norm<D>(p - q); }
  Vec<D> center() const { return 0.5 * (p + q); }
  double extent() const { return q[0] - p[0]; }

  bool collinear() const {
    for (int i = 1; i < D; ++i)
      if (p[i] != q[i]) return false;
    return true;
  }
};

/// Radius of the contour, ||p - q|| / 2.
template <int D>
double snake_radius(const Snake<D>& s) {
  return s.radius();
}

enum class RampMode : std::uint8_t {
  /// Ramp widths are fractions of the radius; the profile is scale invariant.
  Proportional,
  /// Ramp widths are fixed in voxels while the contour grows and shrinks.
  FixedVoxels,
};

/// Shape parameters of the radial weight. `outer_width` is the width of the
/// transition at R, either as a fraction of R or in voxels depending on
/// `mode`. The inner transition at rho*R is narrower by 2^(1/d). A width of
/// zero gives the hard-edged profile (energy only, no gradients).
struct ContourProfile {
  int dim = 3;
  RampMode mode = RampMode::Proportional;
  double outer_width = 0.1;

  /// Inner-to-outer radius ratio 2^(-1/d): inner ball and shell have equal
  /// measure.
  double rho() const;
  double outer_ramp(double radius) const;
  double inner_ramp(double radius) const;
  /// Radius of the support R + outer_ramp/2; the weight vanishes beyond it.
  double support(double radius) const { return radius + 0.5 * outer_ramp(radius); }
  bool hard_edged() const { return outer_width == 0.0; }

  static ContourProfile hard(int dim) { return {dim, RampMode::Proportional, 0.0}; }
};

struct WeightSample {
  double value = 0.0;
  double d_r = 0.0;  ///< partial derivative with respect to the sample radius
  double d_R = 0.0;  ///< partial derivative with respect to the contour radius
};

/// The two lobes of the weight, S = neg + gain * pos, with their partials.
/// neg is -1 inside rho*R and pos is +1 on the shell.
struct LobeSample {
  WeightSample neg;
  WeightSample pos;
};

/// The radial weight S(r) for a contour of a given radius: -1 on the inner
/// ball, +gain on the shell, zero outside, with C1 smoothstep transitions.
/// The shell gain is chosen so that the integral of S(r) r^(d-1) vanishes.
class RadialWeight {
 public:
  /// Throws DegenerateContour if the two transitions overlap.
  RadialWeight(const ContourProfile& profile, double radius);

  WeightSample operator()(double r) const;
  double value(double r) const { return (*this)(r).value; }
  /// Lobes without the gain. d_R excludes the drift of the gain itself.
  LobeSample lobes(double r) const;

  double radius() const { return radius_; }
  double support() const { return support_; }
  double gain() const { return gain_; }
  /// d(gain)/dR; zero for proportional ramps.
  double gain_slope() const { return gain_slope_; }
  double inner_ramp_center() const { return inner_c_; }
  double inner_ramp_width() const { return inner_w_; }
  double outer_ramp_width() const { return outer_w_; }

 private:
  int dim_;
  RampMode mode_;
  double radius_;
  double rho_;
  double inner_c_, inner_w_;
  double outer_c_, outer_w_;
  double support_;
  double gain_;
  double gain_slope_;  ///< d(gain)/dR, nonzero only for fixed-voxel ramps
};

/// S(r) for a contour of radius R.
double weight(const ContourProfile& profile, double r, double radius);

/// Shell gain that zeroes the radial moment for a contour of the given radius.
/// With proportional ramps the result does not depend on the radius.
double moment_balance(const ContourProfile& profile, double radius = 1.0);

/// Chain-rule derivatives of S(|k - c|) with respect to p and q at sample
/// point k. The radial term is taken as zero at k == c.
template <int D>
std::pair<Vec<D>, Vec<D>> weight_partials(const RadialWeight& w, const Vec<D>& k,
                                          const Vec<D>& p, const Vec<D>& q);

template <int D>
struct Box {
  Vec<D> lo{};
  Vec<D> hi{};
};

/// Regular cubic lattice of contours with radius r0 and nearest-neighbour
/// spacing sqrt(1.5)*r0, centred in the domain. Every footprint lies inside
/// the domain. Returns an empty list when not even one footprint fits.
template <int D>
std::vector<Snake<D>> lattice_init(const Box<D>& domain, double r0,
                                   const ContourProfile& profile);

/// Number of lattice positions along one axis of length `extent`.
int lattice_count(double extent, double r0, const ContourProfile& profile);

}  // namespace snk

#endif  // SNK_GEOMETRY_HPP
