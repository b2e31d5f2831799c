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

// Shared fixtures and independent oracles for the unit tests.
#ifndef SNK_TESTS_SUPPORT_HPP
#define SNK_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "swarm.hpp"
#include "volume.hpp"

namespace snk::testing {

/// n^3 volume with `inside` where the distance to `center` is below r0.
inline ImageVolume binary_sphere(std::size_t n, std::array<double, 3> center, double r0,
                                 float inside = 2.0f, float outside = 0.0f) {
  ImageVolume v(3, {n, n, n});
  for (std::size_t z = 0; z < n; ++z)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) {
        const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
        v.at(x, y, z) = std::sqrt(dx * dx + dy * dy + dz * dz) < r0 ? inside : outside;
      }
  return v;
}

/// Composite Simpson rule on [a, b] with m (even) panels.
template <typename F>
double simpson(F&& f, double a, double b, int m = 2000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Random non-overlapping spheres with a gap of at least `gap` voxels
/// between surfaces and centres at least `margin` from every face.
inline PhantomSpec random_spheres(std::uint64_t seed, int count, std::size_t n, double r_lo, double r_hi,
                                  double margin, double gap, double amplitude) {
  PhantomSpec spec;
  spec.dim = 3;
  spec.dims = {n, n, n};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(r_lo, r_hi);
  std::uniform_real_distribution<double> coord(margin, static_cast<double>(n - 1) - margin);
  while (static_cast<int>(spec.spheres.size()) < count) {
    PhantomSphere s;
    s.r0 = radius(rng);
    s.amplitude = amplitude;
    s.center = {coord(rng), coord(rng), coord(rng)};
    bool ok = true;
    for (const auto& o : spec.spheres) {
      double d2 = 0.0;
      for (int i = 0; i < 3; ++i) d2 += (o.center[i] - s.center[i]) * (o.center[i] - s.center[i]);
      if (std::sqrt(d2) < o.r0 + s.r0 + gap) ok = false;
    }
    if (ok) spec.spheres.push_back(s);
  }
  return spec;
}

/// Elimination by exhaustive search: among all overlapping pairs, take the
/// pair whose better member ranks first by (energy, id) and, within that,
/// whose worse member ranks first; drop the worse member; repeat.
template <int D>
std::vector<Scored<D>> brute_force_cull(std::vector<Scored<D>> v) {
  auto better = [](const Scored<D>& a, const Scored<D>& b) {
    return a.energy < b.energy || (a.energy == b.energy && a.id < b.id);
  };
  for (;;) {
    int best_w = -1, best_l = -1;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (i == j || !better(v[i], v[j])) continue;
        const Vec<D> d = v[i].snake.center() - v[j].snake.center();
        const double lim = std::max(v[i].snake.radius(), v[j].snake.radius()) / std::pow(2.0, 1.0 / D);
        if (!(norm<D>(d) < lim)) continue;
        if (best_w < 0 || better(v[i], v[best_w]) ||
            (static_cast<int>(i) == best_w && better(v[j], v[best_l]))) {
          best_w = static_cast<int>(i);
          best_l = static_cast<int>(j);
        }
      }
    if (best_w < 0) break;
    v.erase(v.begin() + best_l);
  }
  std::sort(v.begin(), v.end(), [&](const Scored<D>& a, const Scored<D>& b) { return better(a, b); });
  return v;
}

}  // namespace snk::testing

#endif  // SNK_TESTS_SUPPORT_HPP
