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

#ifndef SNK_ENERGY_HPP
#define SNK_ENERGY_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "random.hpp"
#include "vec.hpp"
#include "volume.hpp"

namespace snk {

class ThreadPool;

/// Contrast energy of one contour and its gradient with respect to the two
/// identifier points. `e_norm` is `e_raw / (q_x - p_x)^d`.
template <int D>
struct EnergyReport {
  double e_raw = 0.0;
  double e_norm = 0.0;
  Vec<D> grad_p{};
  Vec<D> grad_q{};
  std::size_t n_samples = 0;
};

struct EnergyOptions {
  /// Smallest admissible q_x - p_x, in voxels.
  double min_extent = 2.0;
  /// When set, the partial sums of one contour are computed in parallel.
  /// Chunk boundaries and the reduction tree do not depend on it, so the
  /// result is bit-identical either way.
  ThreadPool* pool = nullptr;
  /// Grid integration only: choose the shell gain so that the weights summed
  /// over the grid points of the footprint vanish, rather than using the
  /// continuous balance. A constant image then has zero energy and zero
  /// gradient at every pose instead of a small lattice-dependent residue.
  bool lattice_balance = true;
};

/// Samples per reduction chunk for Monte-Carlo integration.
inline constexpr int kSampleChunk = 128;

/// Sum of S(|k - c|) I(k) over every voxel k inside the support ball.
/// Throws DegenerateContour when the footprint leaves the image or the
/// contour is too small.
template <int D>
EnergyReport<D> energy_grid(const ImageVolume& img, const Snake<D>& s, const ContourProfile& profile,
                            const EnergyOptions& opts = {});

/// Monte-Carlo estimate of the same integral from `n` uniform samples in the
/// support ball, each weighted by ball measure / n. Value and gradient share
/// the sample set. Intensities are interpolated d-linearly.
template <int D>
EnergyReport<D> energy_mc(const ImageVolume& img, const Snake<D>& s, const ContourProfile& profile,
                          int n, const StreamKey& key, const EnergyOptions& opts = {});

/// Closed-form energy of a concentric hard-edged contour of radius R around
/// the blob I(r) = 1 + sign(r0 - r).
double analytic_blob_energy(double radius, double r0, int dim = 3);

/// analytic_blob_energy(R, r0) / R^d for each R.
std::vector<double> normalized_energy_curve(double r0, std::span<const double> radii, int dim = 3);

}  // namespace snk

#endif  // SNK_ENERGY_HPP
