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

// Acceptance gate: one PASS/FAIL line per criterion. Arguments select
// criteria by number; no arguments runs all of them. Exit status is 0 only
// when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <thread>
#include <vector>

#include "detections.hpp"
#include "energy.hpp"
#include "geometry.hpp"
#include "metrics.hpp"
#include "swarm.hpp"
#include "volume.hpp"

#include "../support.hpp"

namespace {

using namespace snk;
namespace fs = std::filesystem;

constexpr double kPi = 3.14159265358979323846;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Hard-profile energy of a concentric contour on I = 2 inside r0, 0 outside,
// written out from the weight directly: -1 on the inner ball of radius
// R / 2^(1/3), +1 on the shell up to R, and the image mass in each region.
double oracle_energy(double R, double r0) {
  auto ball = [](double r) { return 4.0 / 3.0 * kPi * r * r * r; };
  const double inner = std::cbrt(0.5) * R;
  const double in_inner = ball(std::min(r0, inner));
  const double in_shell = ball(std::min(r0, R)) - in_inner;
  return 2.0 * (in_shell - in_inner);
}

std::vector<std::array<double, 3>> off_lattice_centres(int n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::array<double, 3>> out(n);
  for (auto& c : out) c = {32 + u(rng), 32 + u(rng), 32 + u(rng)};
  return out;
}

// Largest |grid - oracle| over the radii and centres, relative to the full
// blob energy, on a lattice of spacing h (voxel units of the 64^3 problem).
double worst_energy_error(double h, const std::vector<std::array<double, 3>>& centres) {
  const double scale = 8.0 / 3.0 * kPi * 1000.0;
  double worst = 0.0;
  for (const auto& c0 : centres) {
    const std::array<double, 3> c{c0[0] / h, c0[1] / h, c0[2] / h};
    const ImageVolume img = testing::binary_sphere(static_cast<std::size_t>(64 / h), c, 10.0 / h);
    for (double R : {8.0, 12.0, 13.0, 16.0}) {
      const auto rep = energy_grid<3>(img, Snake<3>::from_center({c[0], c[1], c[2]}, R / h), ContourProfile::hard(3));
      worst = std::max(worst, std::fabs(rep.e_raw * h * h * h - oracle_energy(R, 10.0)) / scale);
    }
  }
  return worst;
}

Verdict energy_oracle() {
  // Spheres centred on a voxel put whole shells of voxels at one radius, so
  // the oracle is checked at several off-lattice centres.
  const auto centres = off_lattice_centres(8);
  const double e1 = worst_energy_error(1.0, centres);
  const double e2 = worst_energy_error(0.5, {centres.begin(), centres.begin() + 3});
  const double e4 = worst_energy_error(0.25, {centres.begin(), centres.begin() + 3});
  const double e1_sub = worst_energy_error(1.0, {centres.begin(), centres.begin() + 3});
  const double lattice = worst_energy_error(1.0, {{32.0, 32.0, 32.0}});
  Verdict v;
  v.pass = e1 < 0.03 && e2 < e1_sub && e4 < e2;
  v.detail = "worst error " + fmt("%.4f", e1) + " (limit 0.03); halving " + fmt("%.5f", e1_sub) + " > " +
             fmt("%.5f", e2) + " > " + fmt("%.5f", e4) + "; voxel-centred sphere " + fmt("%.4f", lattice);
  return v;
}

Verdict normalized_minimum() {
  const std::array<double, 3> c{32.37, 31.81, 32.55};
  const ImageVolume img = testing::binary_sphere(64, c, 10.0);
  const double target = 10.0 * std::cbrt(2.0);
  Verdict v{true, ""};
  const std::pair<const char*, ContourProfile> profiles[] = {{"hard", ContourProfile::hard(3)}, {"smooth", ContourProfile{}}};
  for (const auto& [label, prof] : profiles) {
    double best_r = 0.0, best_e = 1e300;
    for (double R = 6.0; R <= 24.0; R += 0.05) {
      const double e = energy_grid<3>(img, Snake<3>::from_center({c[0], c[1], c[2]}, R), prof).e_norm;
      if (e < best_e) {
        best_e = e;
        best_r = R;
      }
    }
    const double rel = std::fabs(best_r - target) / target;
    v.pass = v.pass && rel < 0.05;
    v.detail += std::string(v.detail.empty() ? "" : "; ") + label + " argmin R=" +
                fmt("%.2f", best_r) + " (" + fmt("%.2f", 100 * rel) + "% from " + fmt("%.3f", target) + ")";
  }
  return v;
}

Verdict gradient_check() {
  const ImageVolume img = gaussian_smooth(testing::binary_sphere(64, {32.2, 31.6, 32.4}, 10.0, 100.f, 0.f), 1.5);
  const ContourProfile prof{};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double h = 1e-3;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Snake<3> s = Snake<3>::from_center({32 + 5 * u(rng), 32 + 5 * u(rng), 32 + 5 * u(rng)}, 12 + 4 * u(rng));
    const auto rep = energy_grid<3>(img, s, prof);
    double err = 0.0, scale = 0.0;
    for (int side = 0; side < 2; ++side)
      for (int i = 0; i < 3; ++i) {
        Snake<3> a = s, b = s;
        (side ? a.q : a.p)[i] += h;
        (side ? b.q : b.p)[i] -= h;
        const double fd = (energy_grid<3>(img, a, prof).e_norm - energy_grid<3>(img, b, prof).e_norm) / (2 * h);
        err = std::max(err, std::fabs((side ? rep.grad_q[i] : rep.grad_p[i]) - fd));
        scale = std::max(scale, std::fabs(fd));
      }
    worst = std::max(worst, err / scale);
  }
  return {worst < 1e-3, "max relative error " + fmt("%.2e", worst) + " over 100 poses (limit 1e-3)"};
}

Verdict uniform_stationarity() {
  ImageVolume img(3, {64, 64, 64});
  for (float& x : img.data()) x = 42.0f;
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.mode = IntegrationMode::Grid;
  cfg.convergence_tol = 0.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  double worst = 0.0;
  int iters = 0;
  for (int t = 0; t < 10; ++t) {
    const Vec<3> c{32 + u(rng), 32 + u(rng), 32 + u(rng)};
    const auto res = evolve_snake<3>(img, Snake<3>::from_center(c, 12.0 + u(rng) / 3), cfg);
    worst = std::max(worst, norm<3>(res.snake.center() - c));
    iters = std::max(iters, res.iterations);
  }
  return {worst < 0.1, "largest centre drift " + fmt("%.3g", worst) + " voxels after " + std::to_string(iters) +
                           " iterations (limit 0.1)"};
}

Verdict mc_estimator() {
  const ImageVolume img = gaussian_smooth(testing::binary_sphere(64, {32.2, 31.6, 32.4}, 10.0, 100.f, 0.f), 1.5);
  const Snake<3> s = Snake<3>::from_center({33.0, 31.0, 32.5}, 12.7);
  const ContourProfile prof{};
  const double grid = energy_grid<3>(img, s, prof).e_raw;
  auto stats = [&](int n) {
    std::vector<double> e;
    for (std::uint64_t seed = 0; seed < 64; ++seed) e.push_back(energy_mc<3>(img, s, prof, n, StreamKey{seed, 0, 1}).e_raw);
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / e.size();
    double ss = 0.0;
    for (double x : e) ss += (x - mean) * (x - mean);
    return std::pair{mean, std::sqrt(ss / (e.size() - 1))};
  };
  const auto [m1, sd1] = stats(1024);
  const auto [m4, sd4] = stats(4096);
  const double se = sd1 / 8.0;
  const double ratio = sd4 / sd1;
  Verdict v;
  v.pass = std::fabs(m1 - grid) < 3 * se && std::fabs(ratio - 0.5) <= 0.15;
  v.detail = "|mean-grid| " + fmt("%.1f", std::fabs(m1 - grid)) + " vs 3SE " + fmt("%.1f", 3 * se) +
             "; sd ratio n=4096/n=1024 " + fmt("%.3f", ratio) + " (0.5 +- 30%)";
  return v;
}

PhantomSpec random_phantom(std::uint64_t seed, std::size_t n = 128, std::size_t count = 20) {
  PhantomSpec spec;
  spec.dim = 3;
  spec.dims = {n, n, n};
  spec.background = 20.0;
  spec.noise_sigma = 10.0;
  spec.edge = EdgeProfile::Gaussian;
  spec.edge_sigma = 1.0;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(8.0, 12.0), coord(20.0, n - 21.0);
  while (spec.spheres.size() < count) {
    PhantomSphere s;
    s.r0 = radius(rng);
    s.amplitude = 100.0;
    s.center = {coord(rng), coord(rng), coord(rng)};
    bool ok = true;
    for (const auto& o : spec.spheres) {
      double d2 = 0.0;
      for (int i = 0; i < 3; ++i) d2 += (o.center[i] - s.center[i]) * (o.center[i] - s.center[i]);
      if (std::sqrt(d2) < o.r0 + s.r0 + 8.0) ok = false;
    }
    if (ok) spec.spheres.push_back(s);
  }
  return spec;
}

Verdict end_to_end() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::uint64_t seed = 1;
  const Phantom ph = make_phantom(random_phantom(seed), seed);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  SwarmConfig cfg = SwarmConfig::defaults(3);
  cfg.mode = IntegrationMode::MonteCarlo;
  cfg.seed = seed;
  cfg.workers = 0;
  const DetectionSet dets = run_swarm(img, cfg);
  PointSet truth;
  truth.dim = 3;
  for (const auto& s : ph.truth) {
    truth.points.push_back(s.center);
    truth.radii.push_back(s.r0);
  }
  const EvalResult r = match_detections(dets, truth, nominal_tau(truth));
  double far = 0.0;
  for (const Match& m : r.matches) far = std::max(far, m.distance);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = r.precision >= 0.95 && r.recall >= 0.90 && r.f_measure >= 0.92 && far <= 1.0 && secs < 300.0;
  v.detail = "P=" + fmt("%.3f", r.precision) + " R=" + fmt("%.3f", r.recall) + " F=" + fmt("%.3f", r.f_measure) +
             " max centre error " + fmt("%.2f", far) + " voxels, " + fmt("%.0f", secs) + " s";
  return v;
}

Verdict culling() {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> pos(0, 40), rad(3, 9), en(-10, 0);
  int disagreements = 0, violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Scored<3>> v;
    for (std::uint32_t i = 0; i < 20; ++i)
      v.push_back({Snake<3>::from_center({pos(rng), pos(rng), pos(rng)}, rad(rng)), std::round(en(rng)), i});
    const auto fast = cull_overlaps<3>(v);
    const auto slow = testing::brute_force_cull<3>(v);
    bool same = fast.size() == slow.size();
    for (std::size_t i = 0; same && i < fast.size(); ++i) same = fast[i].id == slow[i].id;
    disagreements += same ? 0 : 1;
    for (std::size_t i = 0; i < fast.size(); ++i)
      for (std::size_t j = i + 1; j < fast.size(); ++j) {
        const double d = norm<3>(fast[i].snake.center() - fast[j].snake.center());
        if (d < std::max(fast[i].snake.radius(), fast[j].snake.radius()) / std::cbrt(2.0)) ++violations;
      }
  }
  const Snake<3> s = Snake<3>::from_center({10, 11, 12}, 6.0);
  const auto dup = cull_overlaps<3>({{s, -4.0, 3}, {s, -4.0, 7}});
  const bool dup_ok = dup.size() == 1 && dup[0].id == 3;
  return {disagreements == 0 && violations == 0 && dup_ok,
          std::to_string(disagreements) + " oracle disagreements in 100 trials, " + std::to_string(violations) +
              " separation violations, duplicate pair keeps " + std::to_string(dup.size())};
}

Verdict determinism() {
  const Phantom ph = make_phantom(random_phantom(4, 96, 8), 4);
  const ImageVolume img = gaussian_smooth(ph.volume, 1.0);
  std::string reference;
  int runs = 0, differing = 0;
  const unsigned max_workers = std::max(1u, std::thread::hardware_concurrency());
  for (Schedule sched : {Schedule::PerSnake, Schedule::IntraSnake})
    for (unsigned w : {1u, 4u, max_workers}) {
      SwarmConfig cfg = SwarmConfig::defaults(3);
      cfg.mode = IntegrationMode::MonteCarlo;
      cfg.seed = 77;
      cfg.max_iters = 120;
      cfg.schedule = sched;
      cfg.workers = w;
      const std::string csv = format_detections_csv(run_swarm(img, cfg));
      if (runs++ == 0)
        reference = csv;
      else if (csv != reference)
        ++differing;
    }
  const auto rows = std::count(reference.begin(), reference.end(), '\n') - 1;
  return {differing == 0 && rows > 0, std::to_string(runs) + " runs (workers 1/4/" + std::to_string(max_workers) +
                                          ", two schedules), " + std::to_string(differing) + " differ from the first, " +
                                          std::to_string(rows) + " detections"};
}

struct BenchRow {
  std::size_t snakes = 0;
  std::string mode, schedule;
  unsigned workers = 0;
  double wall_ms = 0.0;
  std::uint64_t iterations = 0;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SNK_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<BenchRow> read_bench(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<BenchRow> rows;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    BenchRow r;
    ss >> r.snakes >> r.mode >> r.schedule >> r.workers >> r.wall_ms >> r.iterations;
    rows.push_back(r);
  }
  return rows;
}

Verdict performance() {
  const fs::path dir = fs::temp_directory_path() / "snk_acceptance_bench";
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json") << format_phantom_spec(random_phantom(1));
  if (run_cli("phantom " + (dir / "spec.json").string() + " --out " + (dir / "vol.raw").string()) != 0)
    return {false, "phantom generation failed"};

  const std::string vol = (dir / "vol.raw").string();
  if (run_cli("bench " + vol + " --r0-list 15 --modes grid,mc --samples 1024 --worker-list 1 --max-iters 40 --csv " +
              (dir / "modes.csv").string()) != 0)
    return {false, "bench (modes) failed"};
  double grid_ms = 0.0, mc_ms = 0.0;
  for (const auto& r : read_bench(dir / "modes.csv")) (r.mode == "grid" ? grid_ms : mc_ms) = r.wall_ms;
  const double mode_gain = grid_ms / mc_ms;

  if (run_cli("bench " + vol + " --r0-list 6 --modes mc --samples 1024 --worker-list 1,0 --max-iters 10 --csv " +
              (dir / "workers.csv").string()) != 0)
    return {false, "bench (workers) failed"};
  const auto rows = read_bench(dir / "workers.csv");
  if (rows.size() != 2) return {false, "unexpected worker bench output"};
  const double speedup = rows[0].wall_ms / rows[1].wall_ms;

  Verdict v;
  v.pass = mode_gain >= 2.0 && speedup > 2.0 && rows[0].snakes >= 4096;
  v.detail = "mc vs grid at R0=15: " + fmt("%.1f", mode_gain) + "x (need >= 2); " + std::to_string(rows[0].snakes) +
             " snakes, 1 vs " + std::to_string(rows[1].workers) + " workers: " + fmt("%.2f", speedup) +
             "x (need > 2)";
  return v;
}

Verdict metrics_arithmetic() {
  const double f = f_measure(0.97, 0.84);
  return {std::fabs(f - 0.8953) <= 0.0005,
          "F(0.97, 0.84) = " + fmt("%.5f", f) + ", required 0.8953 +- 0.0005; rounds to " + fmt("%.2f", f)};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"analytic energy oracle", energy_oracle},
      {"normalized energy minimum", normalized_minimum},
      {"gradient vs finite differences", gradient_check},
      {"uniform image stationarity", uniform_stationarity},
      {"monte carlo estimator", mc_estimator},
      {"end-to-end detection", end_to_end},
      {"culling properties", culling},
      {"determinism", determinism},
      {"performance trend", performance},
      {"metrics arithmetic", metrics_arithmetic},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) {
    const int k = std::atoi(argv[i]);
    if (k < 1 || k > static_cast<int>(all.size())) {
      std::cerr << "unknown criterion '" << argv[i] << "'\n";
      return 2;
    }
    pick.push_back(k);
  }
  if (pick.empty())
    for (int k = 1; k <= static_cast<int>(all.size()); ++k) pick.push_back(k);

  int failed = 0;
  for (int k : pick) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = all[k - 1].run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2d %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", k, all[k - 1].name, v.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
