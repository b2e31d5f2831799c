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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "error.hpp"
#include "support.hpp"
#include "swarm.hpp"

namespace snk {
namespace {

const ImageVolume& blob() {
  static const ImageVolume v = gaussian_smooth(testing::binary_sphere(64, {32, 32, 32}, 10.0, 100.f, 0.f), 1.0);
  return v;
}

SwarmConfig grid_config() {
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.mode = IntegrationMode::Grid;
  return cfg;
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(SwarmConfig::defaults(3).validate());
  EXPECT_NO_THROW(SwarmConfig::defaults(2).validate());
  auto bad = [](auto mutate) {
    SwarmConfig c = SwarmConfig::defaults(3);
    mutate(c);
    EXPECT_THROW(c.validate(), Error);
  };
  bad([](SwarmConfig& c) { c.e0 = 0.5; });
  bad([](SwarmConfig& c) { c.max_iters = 0; });
  bad([](SwarmConfig& c) { c.r0 = 0.9; });
  bad([](SwarmConfig& c) { c.n_samples = 0; });
  bad([](SwarmConfig& c) { c.eps0 = -1; });
  bad([](SwarmConfig& c) { c.dim = 4; });
  bad([](SwarmConfig& c) { c.profile.outer_width = 0.0; });
  bad([](SwarmConfig& c) { c.profile.outer_width = 0.3; });
}

TEST(Evolve, OptimumIsStationary) {
  const ImageVolume img = testing::binary_sphere(64, {32, 32, 32}, 10.0, 100.f, 0.f);
  const auto found = evolve_snake(img, Snake<3>::from_center({32, 32, 32}, 10.0 * std::cbrt(2.0)), grid_config());
  ASSERT_TRUE(found.converged());
  // The ramps pull the optimum slightly inside cbrt(2) r0.
  EXPECT_NEAR(found.snake.radius(), 10.0 * std::cbrt(2.0), 0.01 * 10.0 * std::cbrt(2.0));
  EXPECT_LE(found.iterations, 100);
  EXPECT_LT(norm<3>(found.snake.center() - Vec<3>{32, 32, 32}), 1e-3);
  // Restarting resets the step schedule to its largest value; the first
  // step off the optimum must still be tiny.
  SwarmConfig one = grid_config();
  one.max_iters = 1;
  const auto res = evolve_snake(img, found.snake, one);
  EXPECT_LT(norm<3>(res.snake.p - found.snake.p), 0.01);
  EXPECT_LT(norm<3>(res.snake.q - found.snake.q), 0.01);
}

TEST(Evolve, FirstStepOnReferencePose) {
  SwarmConfig cfg = grid_config();
  cfg.max_iters = 1;
  const Snake<3> s = Snake<3>::from_center({35, 32, 32}, 15.0);
  const auto res = evolve_snake(blob(), s, cfg);
  const double step = std::max(max_abs<3>(res.snake.p - s.p), max_abs<3>(res.snake.q - s.q));
  EXPECT_GT(step, 1.5);
  EXPECT_LT(step, 4.0);
}

TEST(Evolve, ConvergesFromOffset) {
  for (IntegrationMode mode : {IntegrationMode::Grid, IntegrationMode::MonteCarlo}) {
    SwarmConfig cfg = grid_config();
    cfg.mode = mode;
    for (Vec<3> off : {Vec<3>{3, 0, 0}, Vec<3>{0, -3, 0}, Vec<3>{1.7, 1.7, -1.7}}) {
      const auto res = evolve_snake(blob(), Snake<3>::from_center(Vec<3>{32, 32, 32} + off, 15.0), cfg, 5);
      ASSERT_TRUE(res.alive());
      EXPECT_LT(norm<3>(res.snake.center() - Vec<3>{32, 32, 32}), 1.0);
      EXPECT_NEAR(res.snake.radius(), 10.0 * std::cbrt(2.0), 0.1 * 10.0 * std::cbrt(2.0));
      EXPECT_TRUE(res.snake.collinear());
    }
  }
}

TEST(Evolve, ConstantImageDoesNotSlide) {
  ImageVolume img(3, {64, 64, 64});
  for (float& x : img.data()) x = 80.f;
  SwarmConfig cfg = grid_config();
  cfg.convergence_tol = 0.0;  // run all 400 iterations
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-4, 4);
  for (int t = 0; t < 4; ++t) {
    const Snake<3> s = Snake<3>::from_center({32 + u(rng), 32 + u(rng), 32 + u(rng)}, 12 + u(rng));
    const auto res = evolve_snake(img, s, cfg);
    EXPECT_EQ(res.iterations, 400);
    EXPECT_LT(norm<3>(res.snake.center() - s.center()), 0.1);
  }
}

TEST(Evolve, EnergyDescendsWithSmallSteps) {
  SwarmConfig cfg = grid_config();
  cfg.eps0 = 20.0;
  cfg.max_iters = 1;
  Snake<3> s = Snake<3>::from_center({34.5, 30.0, 33.0}, 15.0);
  double prev = energy_grid(blob(), s, cfg.profile).e_norm;
  // One step at a time with eps0 / sqrt(n) reproduced by shrinking eps0.
  for (int n = 1; n <= 60; ++n) {
    SwarmConfig step = cfg;
    step.eps0 = cfg.eps0 / std::sqrt(static_cast<double>(n));
    s = evolve_snake(blob(), s, step).snake;
    const double e = energy_grid(blob(), s, cfg.profile).e_norm;
    EXPECT_LE(e, prev + 1e-9) << "iteration " << n;
    prev = e;
  }
}

TEST(Evolve, CollapseAndNoFit) {
  // A single bright voxel: the best contour around it is smaller than the
  // minimum extent.
  ImageVolume dot(3, {48, 48, 48});
  dot.at(24, 24, 24) = 100.f;
  SwarmConfig cfg = grid_config();
  const auto shrink = evolve_snake(dot, Snake<3>::from_center({24.2, 23.9, 24.1}, 3.0), cfg);
  EXPECT_EQ(shrink.outcome, Outcome::Collapsed);
  EXPECT_FALSE(shrink.alive());
  ImageVolume small(3, {20, 20, 20});
  const auto nofit = evolve_snake(small, Snake<3>::from_center({10, 10, 10}, 12.0), cfg);
  EXPECT_FALSE(nofit.alive());
}

TEST(Evolve, FootprintStaysInside) {
  // A blob near the border pulls the contour against the edge.
  const ImageVolume img = gaussian_smooth(testing::binary_sphere(48, {9, 24, 24}, 7.0, 100.f, 0.f), 1.0);
  SwarmConfig cfg = grid_config();
  cfg.max_iters = 60;
  const auto res = evolve_snake(img, Snake<3>::from_center({17.0, 24, 24}, 12.0), cfg);
  const double sup = cfg.profile.support(res.snake.radius());
  for (int i = 0; i < 3; ++i) {
    EXPECT_GE(res.snake.center()[i] - sup, -1e-9);
    EXPECT_LE(res.snake.center()[i] + sup, 47 + 1e-9);
  }
}

TEST(Overlaps, Inequality) {
  const auto a = Snake<3>::from_center({0, 0, 0}, 10);
  EXPECT_TRUE(overlaps<3>(a, a));
  EXPECT_FALSE(overlaps<3>(a, Snake<3>::from_center({20, 0, 0}, 10)));
  const double lim = 10 / std::cbrt(2.0);
  EXPECT_TRUE(overlaps<3>(a, Snake<3>::from_center({lim - 1e-9, 0, 0}, 6)));
  EXPECT_FALSE(overlaps<3>(a, Snake<3>::from_center({lim + 1e-9, 0, 0}, 6)));
  EXPECT_TRUE(overlaps<2>(Snake<2>::from_center({0, 0}, 10), Snake<2>::from_center({0, 7.0}, 3)));
  EXPECT_FALSE(overlaps<2>(Snake<2>::from_center({0, 0}, 10), Snake<2>::from_center({0, 7.1}, 3)));
}

TEST(Cull, Examples) {
  const auto s = Snake<3>::from_center({10, 10, 10}, 5);
  auto dup = cull_overlaps<3>({{s, -4.0, 0}, {s, -4.0, 1}});
  ASSERT_EQ(dup.size(), 1u);
  EXPECT_EQ(dup[0].id, 0u);
  EXPECT_EQ(cull_overlaps<3>({{s, -4.0, 0}, {Snake<3>::from_center({20, 10, 10}, 5), -3.0, 1}}).size(), 2u);
  auto three = cull_overlaps<3>({{Snake<3>::from_center({10, 10, 10}, 5), -3.0, 0},
                                 {Snake<3>::from_center({11, 10, 10}, 5), -5.0, 1},
                                 {Snake<3>::from_center({10, 11, 10}, 5), -4.0, 2}});
  ASSERT_EQ(three.size(), 1u);
  EXPECT_EQ(three[0].energy, -5.0);
}

TEST(Cull, ChainKeepsNonAdjacent) {
  // a overlaps b, b overlaps c, a and c are apart: the best of a and b wins,
  // and c survives if its only rival was removed.
  auto out = cull_overlaps<2>({{Snake<2>::from_center({0, 0}, 5), -5.0, 0},
                               {Snake<2>::from_center({3, 0}, 5), -4.0, 1},
                               {Snake<2>::from_center({6, 0}, 5), -3.0, 2}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].id, 0u);
  EXPECT_EQ(out[1].id, 2u);
}

TEST(Cull, AgreesWithBruteForce) {
  std::mt19937_64 rng(2468);
  std::uniform_real_distribution<double> pos(0, 40), rad(3, 9), en(-10, 0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Scored<3>> v;
    for (std::uint32_t i = 0; i < 20; ++i) {
      // Quantized energies make ties common.
      v.push_back({Snake<3>::from_center({pos(rng), pos(rng), pos(rng)}, rad(rng)), std::round(en(rng)), i});
    }
    const auto fast = cull_overlaps<3>(v);
    const auto slow = testing::brute_force_cull<3>(v);
    ASSERT_EQ(fast.size(), slow.size()) << "trial " << trial;
    for (std::size_t i = 0; i < fast.size(); ++i) EXPECT_EQ(fast[i].id, slow[i].id);
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t j = i + 1; j < fast.size(); ++j) EXPECT_FALSE(overlaps<3>(fast[i].snake, fast[j].snake));
  }
}

TEST(RunSwarm, BlankImageHasNoDetections) {
  ImageVolume img(3, {64, 64, 64});
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.max_iters = 50;
  RunStats st;
  const DetectionSet out = run_swarm(img, cfg, &st);
  EXPECT_TRUE(out.empty());
  EXPECT_GT(st.snakes_initial, 0u);
}

TEST(RunSwarm, TooSmallImageIsEmptyDomain) {
  ImageVolume img(3, {20, 20, 20});
  try {
    run_swarm(img, SwarmConfig::defaults(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyDomain);
  }
}

TEST(RunSwarm, DimensionMismatch) {
  ImageVolume img(2, {64, 64, 1});
  EXPECT_THROW(run_swarm(img, SwarmConfig::defaults(3)), Error);
}

PhantomSpec small_scene() {
  PhantomSpec spec = testing::random_spheres(42, 4, 72, 7, 9, 18, 8, 100);
  spec.background = 10;
  spec.noise_sigma = 5;
  spec.edge = EdgeProfile::Gaussian;
  return spec;
}

TEST(RunSwarm, FindsSpheres) {
  const PhantomSpec spec = small_scene();
  const Phantom ph = make_phantom(spec, 3);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.r0 = 12;
  const DetectionSet out = run_swarm(img, cfg);
  ASSERT_EQ(out.size(), spec.spheres.size());
  for (const auto& s : spec.spheres) {
    double best = 1e300;
    for (const auto& d : out.items)
      best = std::min(best, std::hypot(d.center[0] - s.center[0], d.center[1] - s.center[1], d.center[2] - s.center[2]));
    EXPECT_LT(best, 1.0);
  }
  for (std::size_t i = 0; i + 1 < out.size(); ++i) EXPECT_LE(out.items[i].energy, out.items[i + 1].energy);
  for (const auto& d : out.items) EXPECT_LE(d.energy, cfg.e0);
}

TEST(RunSwarm, DeterministicAcrossWorkersAndSchedules) {
  const Phantom ph = make_phantom(small_scene(), 3);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  for (IntegrationMode mode : {IntegrationMode::MonteCarlo, IntegrationMode::Grid}) {
    SwarmConfig cfg = SwarmConfig::defaults(3);
    cfg.r0 = 12;
    cfg.mode = mode;
    cfg.max_iters = mode == IntegrationMode::Grid ? 40 : 400;
    cfg.workers = 1;
    const std::string ref = format_detections_csv(run_swarm(img, cfg));
    for (Schedule sch : {Schedule::PerSnake, Schedule::IntraSnake})
      for (unsigned w : {1u, 3u, 4u}) {
        cfg.schedule = sch;
        cfg.workers = w;
        EXPECT_EQ(format_detections_csv(run_swarm(img, cfg)), ref);
      }
  }
}

TEST(RunSwarm, PeriodicCullingStillSeparates) {
  const Phantom ph = make_phantom(small_scene(), 3);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.r0 = 12;
  cfg.cull_every = 50;
  const DetectionSet out = run_swarm(img, cfg);
  EXPECT_EQ(out.size(), 4u);
}

TEST(RunSwarm, SeedChangesMonteCarloPath) {
  const Phantom ph = make_phantom(small_scene(), 3);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.r0 = 12;
  cfg.max_iters = 30;
  const std::string a = format_detections_csv(run_swarm(img, cfg));
  cfg.seed = 99;
  EXPECT_NE(format_detections_csv(run_swarm(img, cfg)), a);
}

TEST(RunSwarm, TwoDimensional) {
  ImageVolume img(2, {96, 96, 1});
  const double cx[3] = {25, 70, 40}, cy[3] = {30, 28, 70}, r0[3] = {8, 9, 10};
  for (std::size_t y = 0; y < 96; ++y)
    for (std::size_t x = 0; x < 96; ++x)
      for (int k = 0; k < 3; ++k)
        if (std::hypot(x - cx[k], y - cy[k]) < r0[k]) img.at(x, y) = 100.f;
  img = gaussian_smooth(img, 1.0);
  SwarmConfig cfg = SwarmConfig::defaults(2);
  cfg.r0 = 12;
  const DetectionSet out = run_swarm(img, cfg);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out.dim, 2);
  for (int k = 0; k < 3; ++k) {
    double best = 1e300;
    for (const auto& d : out.items) best = std::min(best, std::hypot(d.center[0] - cx[k], d.center[1] - cy[k]));
    EXPECT_LT(best, 1.0);
  }
}

}  // namespace
}  // namespace snk
