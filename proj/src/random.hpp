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

#ifndef SNK_RANDOM_HPP
#define SNK_RANDOM_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace snk {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
/// block is a pure function of (counter, key), so streams can be evaluated
/// out of order and from any thread.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t m0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t m1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(m1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(m1),
             static_cast<std::uint32_t>(m0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(m0)};
    }
    return ctr;
  }
};

/// Identifies one random stream: global seed, contour id and iteration.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t stream = 0;
  std::uint32_t iteration = 0;

  /// Block `sub` of the draw with index `index` on this stream.
  Philox4x32::Counter block(std::uint32_t index, std::uint32_t sub) const {
    return Philox4x32::generate({index, sub, iteration, stream},
                                {static_cast<std::uint32_t>(seed),
                                 static_cast<std::uint32_t>(seed >> 32)});
  }
};

/// Maps a 32-bit word to [0, 1).
constexpr double unit_interval(std::uint32_t x) { return x * 0x1p-32; }

/// Maps a 32-bit word to (0, 1), safe as a logarithm argument.
constexpr double open_unit_interval(std::uint32_t x) { return (x + 0.5) * 0x1p-32; }

/// Box-Muller pair of standard normals from two words.
inline std::array<double, 2> box_muller(std::uint32_t a, std::uint32_t b) {
  const double radius = std::sqrt(-2.0 * std::log(open_unit_interval(a)));
  const double angle = 2.0 * std::numbers::pi * unit_interval(b);
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace snk

#endif  // SNK_RANDOM_HPP
