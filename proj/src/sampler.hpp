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

#ifndef SNK_SAMPLER_HPP
#define SNK_SAMPLER_HPP

#include <cstdint>
#include <numbers>
#include <vector>

#include "random.hpp"
#include "vec.hpp"

namespace snk {

/// Points relative to a contour centre plus the per-point integration weight
/// (region measure / n).
template <int D>
struct SampleBatch {
  std::vector<Vec<D>> points;
  double weight = 0.0;
};

/// Polar map of the unit square onto the disk: radius * sqrt(u) at angle theta.
inline Vec<2> disk_point(double radius, double u, double theta) {
  const double r = radius * std::sqrt(u);
  return {r * std::cos(theta), r * std::sin(theta)};
}

/// radius * cbrt(u) along the direction of a (non-zero) Gaussian triple.
inline Vec<3> ball_point(double radius, double u, const Vec<3>& gaussian) {
  const double scale = radius * std::cbrt(u) / norm<3>(gaussian);
  return scale * gaussian;
}

/// Measure of the d-ball of the given radius.
constexpr double ball_measure(int d, double radius) {
  return d == 2 ? std::numbers::pi * radius * radius
                : 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
}

/// Sample `index` of a stream, uniform in the disk or ball of `radius`.
template <int D>
Vec<D> uniform_sample(double radius, const StreamKey& key, std::uint32_t index) {
  const auto a = key.block(index, 0);
  if constexpr (D == 2) {
    return disk_point(radius, unit_interval(a[0]), 2.0 * std::numbers::pi * unit_interval(a[1]));
  } else {
    const auto b = key.block(index, 1);
    const auto g01 = box_muller(a[1], a[2]);
    const auto g2 = box_muller(a[3], b[0]);
    return ball_point(radius, unit_interval(b[1]), {g01[0], g01[1], g2[0]});
  }
}

SampleBatch<2> sample_disk(double radius, int n, const StreamKey& key);
SampleBatch<3> sample_ball(double radius, int n, const StreamKey& key);

}  // namespace snk

#endif  // SNK_SAMPLER_HPP
