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

#include "sampler.hpp"

#include "error.hpp"

namespace snk {
namespace {

template <int D>
SampleBatch<D> sample(double radius, int n, const StreamKey& key) {
  if (!(radius > 0.0) || n < 1) throw_config("sampling needs radius > 0 and n >= 1");
  SampleBatch<D> batch;
  batch.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    batch.points.push_back(uniform_sample<D>(radius, key, static_cast<std::uint32_t>(i)));
  batch.weight = ball_measure(D, radius) / n;
  return batch;
}

}  // namespace

SampleBatch<2> sample_disk(double radius, int n, const StreamKey& key) {
  return sample<2>(radius, n, key);
}

SampleBatch<3> sample_ball(double radius, int n, const StreamKey& key) {
  return sample<3>(radius, n, key);
}

}  // namespace snk
