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

#ifndef SNK_VEC_HPP
#define SNK_VEC_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace snk {

template <int D>
using Vec = std::array<double, D>;

template <std::size_t D>
constexpr std::array<double, D> operator+(const std::array<double, D>& a, const std::array<double, D>& b) {
  std::array<double, D> r{};
  for (std::size_t i = 0; i < D; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t D>
constexpr std::array<double, D> operator-(const std::array<double, D>& a, const std::array<double, D>& b) {
  std::array<double, D> r{};
  for (std::size_t i = 0; i < D; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t D>
constexpr std::array<double, D> operator*(double s, const std::array<double, D>& a) {
  std::array<double, D> r{};
  for (std::size_t i = 0; i < D; ++i) r[i] = s * a[i];
  return r;
}

template <std::size_t D>
constexpr double dot(const std::array<double, D>& a, const std::array<double, D>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < D; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t D>
inline double norm(const std::array<double, D>& a) {
  return std::sqrt(dot(a, a));
}

template <std::size_t D>
inline double max_abs(const std::array<double, D>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < D; ++i) m = std::fmax(m, std::fabs(a[i]));
  return m;
}

}  // namespace snk

#endif  // SNK_VEC_HPP
