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

#ifndef SNK_SWARM_HPP
#define SNK_SWARM_HPP

#include <cstdint>
#include <vector>

#include "detections.hpp"
#include "energy.hpp"
#include "geometry.hpp"
#include "volume.hpp"

namespace snk {

class ThreadPool;

enum class IntegrationMode : std::uint8_t { Grid, MonteCarlo };

/// How work is spread over workers: one task per contour, or the sample
/// chunks of a single contour in parallel. Both give identical results.
enum class Schedule : std::uint8_t { PerSnake, IntraSnake };

/// Step scale for gradient descent with intensity-normalized gradients.
/// A contour of radius 15 three voxels off a sphere of radius 10 takes a
/// first step of about 2.6 voxels. Smaller values leave contours that start
/// half a lattice cell away from a blob short of it after 400 iterations.
inline constexpr double kDefaultEps0 = 200.0;

struct SwarmConfig {
  int dim = 3;
  double r0 = 15.0;
  double eps0 = kDefaultEps0;
  int max_iters = 400;
  double e0 = -3.0;
  int n_samples = 1024;
  IntegrationMode mode = IntegrationMode::MonteCarlo;
  std::uint64_t seed = 0;
  double min_extent = 2.0;
  double convergence_tol = 1e-3;
  ContourProfile profile{};
  /// Divide gradients by the largest absolute intensity of the image.
  bool normalize_gradient = true;
  /// Draw fresh Monte-Carlo samples every iteration; false freezes them.
  bool redraw_samples = true;
  /// Resolve overlaps every k iterations as well as at the end (0: only at the end).
  int cull_every = 0;
  Schedule schedule = Schedule::PerSnake;
  /// 0 means one worker per hardware thread.
  unsigned workers = 0;

  static SwarmConfig defaults(int dim);
  /// Throws a config error naming the first invalid field.
  void validate() const;
};

enum class Outcome : std::uint8_t {
  Converged,
  IterationLimit,
  /// Extent fell below min_extent or the radius became too small for the profile.
  Collapsed,
  /// Pinned against the image border for too long, or too large to fit.
  Runaway,
};

/// Consecutive clamped iterations after which a contour is dropped.
inline constexpr int kRunawayStreak = 10;

template <int D>
struct EvolveResult {
  Snake<D> snake;
  EnergyReport<D> report;  ///< energy at the final pose
  int iterations = 0;
  Outcome outcome = Outcome::IterationLimit;

  bool converged() const { return outcome == Outcome::Converged; }
  bool alive() const { return outcome == Outcome::Converged || outcome == Outcome::IterationLimit; }
};

/// Gradient descent p <- p - eps * dE/dp, q <- q - eps * dE/dq with
/// eps = eps0 / sqrt(n) at 1-based iteration n. The footprint is clamped into
/// the image after every step. Stops at max_iters or once neither point
/// moves by more than convergence_tol.
template <int D>
EvolveResult<D> evolve_snake(const ImageVolume& img, const Snake<D>& s, const SwarmConfig& cfg,
                             std::uint32_t id = 0, ThreadPool* pool = nullptr);

struct RunStats {
  std::size_t snakes_initial = 0;
  std::size_t collapsed = 0;
  std::size_t runaway = 0;
  std::size_t below_threshold = 0;  ///< alive contours with energy <= e0
  std::size_t detections = 0;
  std::uint64_t iterations_total = 0;
  double init_ms = 0.0;
  double evolve_ms = 0.0;
  double cull_ms = 0.0;
};

/// Lattice initialization, evolution of every contour, removal of contours
/// with energy above e0, then overlap competition. Detections come back in
/// ascending energy (ties by id). Throws Error(EmptyDomain) when the image
/// cannot hold a single contour.
DetectionSet run_swarm(const ImageVolume& img, const SwarmConfig& cfg, RunStats* stats = nullptr);

template <int D>
struct Scored {
  Snake<D> snake;
  double energy = 0.0;
  std::uint32_t id = 0;
};

/// True when ||c' - c''|| < max(R', R'') / 2^(1/d).
template <int D>
bool overlaps(const Snake<D>& a, const Snake<D>& b);

/// Keeps the lower-energy member of every overlapping pair: contours are
/// visited by ascending (energy, id) and kept unless they overlap one
/// already kept. The result has no overlapping pair and preserves the
/// visiting order.
template <int D>
std::vector<Scored<D>> cull_overlaps(std::vector<Scored<D>> contours);

}  // namespace snk

#endif  // SNK_SWARM_HPP
