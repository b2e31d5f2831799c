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

#include "swarm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>

#include "error.hpp"
#include "parallel.hpp"

namespace snk {

SwarmConfig SwarmConfig::defaults(int dim) {
  SwarmConfig cfg;
  cfg.dim = dim;
  cfg.profile.dim = dim;
  return cfg;
}

void SwarmConfig::validate() const {
  if (dim != 2 && dim != 3) throw_config("dim must be 2 or 3");
  if (profile.dim != dim) throw_config("profile dimension differs from dim");
  if (!(min_extent > 0.0)) throw_config("min_extent must be > 0");
  if (!(r0 > 0.5 * min_extent)) throw_config("r0 must exceed min_extent / 2");
  if (!(eps0 > 0.0)) throw_config("eps0 must be > 0");
  if (max_iters < 1) throw_config("max_iters must be >= 1");
  if (!(e0 <= 0.0)) throw_config("e0 must be <= 0");
  if (n_samples < 1) throw_config("n_samples must be >= 1");
  if (!(convergence_tol >= 0.0)) throw_config("convergence_tol must be >= 0");
  if (!(profile.outer_width > 0.0)) throw_config("ramp width must be > 0 for evolution");
  if (cull_every < 0) throw_config("cull_every must be >= 0");
  try {
    RadialWeight check(profile, r0);
  } catch (const DegenerateContour& e) {
    throw_config(std::string("profile does not fit r0: ") + e.what());
  }
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// Reserved iteration key for the energy evaluation after evolution stops.
constexpr std::uint32_t kFinalKey = 0xFFFFFFFFu;

template <int D>
struct ContourState {
  Snake<D> snake;
  std::uint32_t id = 0;
  int iteration = 0;
  int clamp_streak = 0;
  bool active = true;
  bool culled = false;
  Outcome outcome = Outcome::IterationLimit;
  std::optional<EnergyReport<D>> final_report;
};

template <int D>
class Evolver {
 public:
  Evolver(const ImageVolume& img, const SwarmConfig& cfg)
      : img_(img), cfg_(cfg), grad_scale_(1.0) {
    opts_.min_extent = cfg.min_extent;
    if (cfg.normalize_gradient) {
      const double m = img.max_abs();
      if (m > 0.0) grad_scale_ = 1.0 / m;
    }
  }

  EnergyReport<D> energy(const Snake<D>& s, std::uint32_t id, std::uint32_t iteration,
                         ThreadPool* pool) const {
    EnergyOptions opts = opts_;
    opts.pool = pool;
    if (cfg_.mode == IntegrationMode::Grid) return energy_grid<D>(img_, s, cfg_.profile, opts);
    const StreamKey key{cfg_.seed, id, cfg_.redraw_samples ? iteration : 0u};
    return energy_mc<D>(img_, s, cfg_.profile, cfg_.n_samples, key, opts);
  }

  /// Iterates until `until` or until the contour stops for another reason.
  void advance(ContourState<D>& st, int until, ThreadPool* pool) const {
    const int stop = std::min(until, cfg_.max_iters);
    while (st.active && st.iteration < stop) {
      const int n = st.iteration + 1;
      EnergyReport<D> rep;
      try {
        rep = energy(st.snake, st.id, static_cast<std::uint32_t>(n), pool);
      } catch (const DegenerateContour&) {
        finish(st, Outcome::Collapsed);
        return;
      }
      const double step = cfg_.eps0 / std::sqrt(static_cast<double>(n)) * grad_scale_;
      const Vec<D> dp = (-step) * rep.grad_p;
      const Vec<D> dq = (-step) * rep.grad_q;
      Snake<D>& s = st.snake;
      s.p = s.p + dp;
      s.q = s.q + dq;
      // y/z gradients of p and q are the same number, so this only pins
      // the invariant against future changes to the update.
      for (int i = 1; i < D; ++i) s.q[i] = s.p[i];
      st.iteration = n;

      if (!(s.extent() >= cfg_.min_extent)) {
        finish(st, Outcome::Collapsed);
        return;
      }
      const auto clamped = clamp_into_image(s);
      if (!clamped) {
        finish(st, Outcome::Runaway);
        return;
      }
      st.clamp_streak = *clamped ? st.clamp_streak + 1 : 0;
      if (st.clamp_streak >= kRunawayStreak) {
        finish(st, Outcome::Runaway);
        return;
      }
      if (std::max(max_abs<D>(dp), max_abs<D>(dq)) < cfg_.convergence_tol) {
        finish(st, Outcome::Converged);
        return;
      }
    }
    if (st.active && st.iteration >= cfg_.max_iters) finish(st, Outcome::IterationLimit);
  }

  /// Energy at the final pose; marks the contour collapsed if it is unusable.
  void settle(ContourState<D>& st, ThreadPool* pool) const {
    if (st.final_report || !alive(st)) return;
    try {
      st.final_report = energy(st.snake, st.id, kFinalKey, pool);
    } catch (const DegenerateContour&) {
      st.outcome = Outcome::Collapsed;
    }
  }

  static bool alive(const ContourState<D>& st) {
    return !st.culled && (st.outcome == Outcome::Converged || st.outcome == Outcome::IterationLimit);
  }

 private:
  static void finish(ContourState<D>& st, Outcome o) {
    st.active = false;
    st.outcome = o;
  }

  /// Shifts the contour so its footprint lies inside the image. Returns
  /// nullopt when it cannot fit at all, otherwise whether it moved.
  std::optional<bool> clamp_into_image(Snake<D>& s) const {
    const double support = cfg_.profile.support(s.radius());
    const Vec<D> c = s.center();
    Vec<D> shift{};
    bool moved = false;
    for (int i = 0; i < D; ++i) {
      const double lo = support;
      const double hi = static_cast<double>(img_.dims()[i]) - 1.0 - support;
      if (lo > hi) return std::nullopt;
      const double target = std::clamp(c[i], lo, hi);
      if (target != c[i]) {
        shift[i] = target - c[i];
        moved = true;
      }
    }
    if (moved) {
      s.p = s.p + shift;
      s.q = s.q + shift;
      // Rounding in the shift can move the footprint by an ulp past the border.
      const Vec<D> c2 = s.center();
      for (int i = 0; i < D; ++i) {
        const double hi = static_cast<double>(img_.dims()[i]) - 1.0 - support;
        double nudge = 0.0;
        if (c2[i] < support) nudge = support - c2[i];
        if (c2[i] > hi) nudge = hi - c2[i];
        s.p[i] += nudge;
        s.q[i] += nudge;
      }
    }
    return moved;
  }

  const ImageVolume& img_;
  const SwarmConfig& cfg_;
  EnergyOptions opts_;
  double grad_scale_;
};

template <int D>
Detection to_detection(const ContourState<D>& st) {
  Detection d;
  const Vec<D> c = st.snake.center();
  for (int i = 0; i < D; ++i) d.center[i] = c[i];
  d.radius = st.snake.radius();
  d.energy = st.final_report->e_norm;
  d.iterations = st.iteration;
  d.converged = st.outcome == Outcome::Converged;
  d.id = st.id;
  return d;
}

template <int D>
DetectionSet run(const ImageVolume& img, const SwarmConfig& cfg, RunStats& stats) {
  auto t0 = Clock::now();
  const auto seeds = lattice_init<D>(img.domain<D>(), cfg.r0, cfg.profile);
  if (seeds.empty())
    throw Error(ErrorKind::EmptyDomain, "image is too small to hold a contour of radius " +
                                            std::to_string(cfg.r0));
  std::vector<ContourState<D>> states(seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    states[i].snake = seeds[i];
    states[i].id = static_cast<std::uint32_t>(i);
  }
  stats.snakes_initial = states.size();
  ThreadPool pool(cfg.workers);
  const Evolver<D> evolver(img, cfg);
  stats.init_ms = ms_since(t0);

  t0 = Clock::now();
  auto for_each_state = [&](auto&& fn) {
    if (cfg.schedule == Schedule::PerSnake)
      pool.parallel_for(states.size(), [&](std::size_t i) { fn(states[i], nullptr); });
    else
      for (auto& st : states) fn(st, &pool);
  };
  const int round = cfg.cull_every > 0 ? cfg.cull_every : cfg.max_iters;
  for (int until = round;; until += round) {
    for_each_state([&](ContourState<D>& st, ThreadPool* p) { evolver.advance(st, until, p); });
    if (until >= cfg.max_iters) break;
    // Periodic competition among the contours still in play.
    for_each_state([&](ContourState<D>& st, ThreadPool* p) {
      if (Evolver<D>::alive(st)) {
        try {
          st.final_report = evolver.energy(st.snake, st.id, kFinalKey, p);
        } catch (const DegenerateContour&) {
          st.final_report.reset();
        }
      }
    });
    std::vector<Scored<D>> live;
    for (const auto& st : states)
      if (Evolver<D>::alive(st) && st.final_report) live.push_back({st.snake, st.final_report->e_norm, st.id});
    std::vector<bool> keep(states.size(), false);
    for (const auto& s : cull_overlaps<D>(std::move(live))) keep[s.id] = true;
    for (auto& st : states) {
      if (Evolver<D>::alive(st) && st.final_report && !keep[st.id]) {
        st.culled = true;
        st.active = false;
      }
      st.final_report.reset();
    }
  }
  for_each_state([&](ContourState<D>& st, ThreadPool* p) { evolver.settle(st, p); });
  stats.evolve_ms = ms_since(t0);

  t0 = Clock::now();
  std::vector<Scored<D>> candidates;
  for (const auto& st : states) {
    stats.iterations_total += static_cast<std::uint64_t>(st.iteration);
    if (st.outcome == Outcome::Collapsed) ++stats.collapsed;
    if (st.outcome == Outcome::Runaway) ++stats.runaway;
    if (!Evolver<D>::alive(st) || !st.final_report) continue;
    if (st.final_report->e_norm > cfg.e0) continue;
    candidates.push_back({st.snake, st.final_report->e_norm, st.id});
  }
  stats.below_threshold = candidates.size();
  DetectionSet out;
  out.dim = D;
  for (const auto& s : cull_overlaps<D>(std::move(candidates))) out.items.push_back(to_detection(states[s.id]));
  stats.detections = out.items.size();
  stats.cull_ms = ms_since(t0);
  return out;
}

}  // namespace

template <int D>
EvolveResult<D> evolve_snake(const ImageVolume& img, const Snake<D>& s, const SwarmConfig& cfg,
                             std::uint32_t id, ThreadPool* pool) {
  if (img.dim() != D || cfg.dim != D) throw_config("dimension mismatch between image, config and contour");
  const Evolver<D> evolver(img, cfg);
  ContourState<D> st;
  st.snake = s;
  st.id = id;
  evolver.advance(st, cfg.max_iters, pool);
  evolver.settle(st, pool);
  EvolveResult<D> res;
  res.snake = st.snake;
  res.iterations = st.iteration;
  res.outcome = st.outcome;
  if (st.final_report) res.report = *st.final_report;
  return res;
}

DetectionSet run_swarm(const ImageVolume& img, const SwarmConfig& cfg, RunStats* stats) {
  cfg.validate();
  if (img.dim() != cfg.dim) throw_config("volume is " + std::to_string(img.dim()) + "D but dim is " +
                                         std::to_string(cfg.dim));
  RunStats local;
  RunStats& st = stats != nullptr ? *stats : local;
  st = RunStats{};
  return cfg.dim == 2 ? run<2>(img, cfg, st) : run<3>(img, cfg, st);
}

template <int D>
bool overlaps(const Snake<D>& a, const Snake<D>& b) {
  const double limit = std::max(a.radius(), b.radius()) * std::pow(2.0, -1.0 / D);
  return norm<D>(a.center() - b.center()) < limit;
}

template <int D>
std::vector<Scored<D>> cull_overlaps(std::vector<Scored<D>> contours) {
  std::stable_sort(contours.begin(), contours.end(), [](const Scored<D>& a, const Scored<D>& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.id < b.id;
  });
  std::vector<Scored<D>> kept;
  for (const auto& c : contours) {
    const bool beaten = std::any_of(kept.begin(), kept.end(),
                                    [&](const Scored<D>& k) { return overlaps<D>(k.snake, c.snake); });
    if (!beaten) kept.push_back(c);
  }
  return kept;
}

template EvolveResult<2> evolve_snake<2>(const ImageVolume&, const Snake<2>&, const SwarmConfig&,
                                         std::uint32_t, ThreadPool*);
template EvolveResult<3> evolve_snake<3>(const ImageVolume&, const Snake<3>&, const SwarmConfig&,
                                         std::uint32_t, ThreadPool*);
template bool overlaps<2>(const Snake<2>&, const Snake<2>&);
template bool overlaps<3>(const Snake<3>&, const Snake<3>&);
template std::vector<Scored<2>> cull_overlaps<2>(std::vector<Scored<2>>);
template std::vector<Scored<3>> cull_overlaps<3>(std::vector<Scored<3>>);

}  // namespace snk
