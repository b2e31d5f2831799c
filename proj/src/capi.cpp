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

#include "snk/snk.h"

#include <fstream>
#include <memory>
#include <new>
#include <string>

#include "detections.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "swarm.hpp"
#include "volume.hpp"

#ifndef SNK_VERSION_STRING
#define SNK_VERSION_STRING "unknown"
#endif

struct snk_volume {
  snk::ImageVolume v;
};

struct snk_points {
  snk::PointSet p;
};

struct snk_detections {
  snk::DetectionSet set;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
snk_status guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SNK_OK;
  } catch (const snk::Error& e) {
    g_last_error = e.what();
    return static_cast<snk_status>(static_cast<int>(e.kind()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown error";
  }
  return SNK_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (p == nullptr) snk::throw_config(std::string(what) + " must not be NULL");
}

snk::SampleType to_cpp(snk_dtype t) {
  switch (t) {
    case SNK_DTYPE_U8: return snk::SampleType::U8;
    case SNK_DTYPE_U16: return snk::SampleType::U16;
    case SNK_DTYPE_F32: return snk::SampleType::F32;
  }
  snk::throw_config("unknown dtype");
}

snk_dtype to_c(snk::SampleType t) {
  switch (t) {
    case snk::SampleType::U8: return SNK_DTYPE_U8;
    case snk::SampleType::U16: return SNK_DTYPE_U16;
    case snk::SampleType::F32: return SNK_DTYPE_F32;
  }
  return SNK_DTYPE_F32;
}

snk::SwarmConfig to_cpp(const snk_config& c) {
  snk::SwarmConfig cfg = snk::SwarmConfig::defaults(c.dim);
  cfg.r0 = c.r0;
  cfg.eps0 = c.eps0;
  cfg.max_iters = c.max_iters;
  cfg.e0 = c.e0;
  cfg.n_samples = c.n_samples;
  if (c.mode != SNK_MODE_GRID && c.mode != SNK_MODE_MC) snk::throw_config("unknown integration mode");
  cfg.mode = c.mode == SNK_MODE_GRID ? snk::IntegrationMode::Grid : snk::IntegrationMode::MonteCarlo;
  cfg.seed = c.seed;
  cfg.min_extent = c.min_extent;
  cfg.convergence_tol = c.convergence_tol;
  if (c.ramp_mode != SNK_RAMP_PROPORTIONAL && c.ramp_mode != SNK_RAMP_FIXED_VOXELS)
    snk::throw_config("unknown ramp mode");
  cfg.profile.mode = c.ramp_mode == SNK_RAMP_PROPORTIONAL ? snk::RampMode::Proportional
                                                           : snk::RampMode::FixedVoxels;
  cfg.profile.outer_width = c.ramp_width;
  cfg.normalize_gradient = c.normalize_gradient != 0;
  cfg.redraw_samples = c.redraw_samples != 0;
  cfg.cull_every = c.cull_every;
  if (c.schedule != SNK_SCHEDULE_PER_SNAKE && c.schedule != SNK_SCHEDULE_INTRA_SNAKE)
    snk::throw_config("unknown schedule");
  cfg.schedule = c.schedule == SNK_SCHEDULE_PER_SNAKE ? snk::Schedule::PerSnake : snk::Schedule::IntraSnake;
  cfg.workers = c.workers;
  return cfg;
}

snk_detections* wrap(snk::DetectionSet set) {
  auto* d = new snk_detections{std::move(set), {}};
  d->csv = snk::format_detections_csv(d->set);
  return d;
}

}  // namespace

extern "C" {

const char* snk_version(void) { return SNK_VERSION_STRING; }

const char* snk_last_error(void) { return g_last_error.c_str(); }

unsigned snk_hardware_workers(void) { return snk::ThreadPool::resolve(0); }

snk_status snk_volume_load(const char* path, const double* spacing, snk_volume** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    snk::ImageVolume v = snk::load_volume(path);
    if (spacing != nullptr) {
      v = snk::load_volume(path, std::vector<double>(spacing, spacing + v.dim()));
    }
    *out = new snk_volume{std::move(v)};
  });
}

snk_status snk_volume_save(const snk_volume* v, const char* path, snk_dtype dtype) {
  return guarded([&] {
    require(v, "volume");
    require(path, "path");
    snk::save_volume(v->v, path, to_cpp(dtype));
  });
}

snk_status snk_volume_save_tiff(const snk_volume* v, const char* path, snk_dtype dtype) {
  return guarded([&] {
    require(v, "volume");
    require(path, "path");
    snk::save_tiff_stack(v->v, path, to_cpp(dtype));
  });
}

snk_status snk_volume_info_get(const snk_volume* v, snk_volume_info* out) {
  return guarded([&] {
    require(v, "volume");
    require(out, "out");
    out->dim = v->v.dim();
    for (int i = 0; i < 3; ++i) {
      out->dims[i] = v->v.dims()[i];
      out->spacing[i] = v->v.spacing()[i];
    }
    out->origin_dtype = to_c(v->v.origin_type());
  });
}

snk_status snk_volume_resample_isotropic(const snk_volume* v, double target, snk_volume** out) {
  return guarded([&] {
    require(v, "volume");
    require(out, "out");
    *out = new snk_volume{snk::resample_isotropic(v->v, target)};
  });
}

snk_status snk_volume_smooth(const snk_volume* v, double sigma, snk_volume** out) {
  return guarded([&] {
    require(v, "volume");
    require(out, "out");
    *out = new snk_volume{snk::gaussian_smooth(v->v, sigma)};
  });
}

snk_status snk_volume_invert(const snk_volume* v, snk_volume** out) {
  return guarded([&] {
    require(v, "volume");
    require(out, "out");
    *out = new snk_volume{snk::invert(v->v)};
  });
}

void snk_volume_free(snk_volume* v) { delete v; }

snk_status snk_phantom_generate(const char* spec_json, const uint64_t* seed, snk_volume** volume,
                                snk_points** truth, size_t* warnings) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(volume, "volume");
    *volume = nullptr;
    if (truth) *truth = nullptr;
    const snk::PhantomSpec spec = snk::parse_phantom_spec(spec_json);
    const std::uint64_t s = seed ? *seed : spec.seed.value_or(0);
    snk::Phantom ph = snk::make_phantom(spec, s);
    if (warnings) *warnings = ph.warnings.size();
    snk::PointSet pts;
    pts.dim = spec.dim;
    for (const auto& sp : ph.truth) {
      pts.points.push_back(sp.center);
      pts.radii.push_back(sp.r0);
    }
    auto vol = std::make_unique<snk_volume>(snk_volume{std::move(ph.volume)});
    if (truth) *truth = new snk_points{std::move(pts)};
    *volume = vol.release();
  });
}

snk_status snk_points_read_csv(const char* path, snk_points** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new snk_points{snk::read_points_csv(path)};
  });
}

snk_status snk_points_write_csv(const snk_points* p, const char* path) {
  return guarded([&] {
    require(p, "points");
    require(path, "path");
    std::ofstream f(path, std::ios::binary);
    if (!f) snk::throw_io(std::string("cannot write '") + path + "'");
    f << snk::format_points_csv(p->p);
  });
}

size_t snk_points_count(const snk_points* p) { return p ? p->p.points.size() : 0; }

int snk_points_dim(const snk_points* p) { return p ? p->p.dim : 0; }

snk_status snk_points_get(const snk_points* p, size_t i, double xyz[3]) {
  return guarded([&] {
    require(p, "points");
    require(xyz, "xyz");
    if (i >= p->p.points.size()) snk::throw_config("point index out of range");
    for (int a = 0; a < 3; ++a) xyz[a] = p->p.points[i][a];
  });
}

void snk_points_free(snk_points* p) { delete p; }

void snk_config_default(snk_config* c, int dim) {
  if (c == nullptr) return;
  const snk::SwarmConfig d = snk::SwarmConfig::defaults(dim);
  c->dim = dim;
  c->r0 = d.r0;
  c->eps0 = d.eps0;
  c->max_iters = d.max_iters;
  c->e0 = d.e0;
  c->n_samples = d.n_samples;
  c->mode = d.mode == snk::IntegrationMode::Grid ? SNK_MODE_GRID : SNK_MODE_MC;
  c->seed = d.seed;
  c->min_extent = d.min_extent;
  c->convergence_tol = d.convergence_tol;
  c->ramp_mode = d.profile.mode == snk::RampMode::Proportional ? SNK_RAMP_PROPORTIONAL : SNK_RAMP_FIXED_VOXELS;
  c->ramp_width = d.profile.outer_width;
  c->normalize_gradient = d.normalize_gradient ? 1 : 0;
  c->redraw_samples = d.redraw_samples ? 1 : 0;
  c->cull_every = d.cull_every;
  c->schedule = d.schedule == snk::Schedule::PerSnake ? SNK_SCHEDULE_PER_SNAKE : SNK_SCHEDULE_INTRA_SNAKE;
  c->workers = d.workers;
}

snk_status snk_config_validate(const snk_config* c) {
  return guarded([&] {
    require(c, "config");
    to_cpp(*c).validate();
  });
}

snk_status snk_segment(const snk_volume* v, const snk_config* c, snk_detections** out, snk_run_stats* stats) {
  return guarded([&] {
    require(v, "volume");
    require(c, "config");
    require(out, "out");
    *out = nullptr;
    snk::RunStats st;
    snk::DetectionSet set = snk::run_swarm(v->v, to_cpp(*c), &st);
    if (stats) {
      stats->snakes_initial = st.snakes_initial;
      stats->collapsed = st.collapsed;
      stats->runaway = st.runaway;
      stats->below_threshold = st.below_threshold;
      stats->detections = st.detections;
      stats->iterations_total = st.iterations_total;
      stats->init_ms = st.init_ms;
      stats->evolve_ms = st.evolve_ms;
      stats->cull_ms = st.cull_ms;
    }
    *out = wrap(std::move(set));
  });
}

size_t snk_detections_count(const snk_detections* d) { return d ? d->set.items.size() : 0; }

int snk_detections_dim(const snk_detections* d) { return d ? d->set.dim : 0; }

snk_status snk_detections_get(const snk_detections* d, size_t i, snk_detection* out) {
  return guarded([&] {
    require(d, "detections");
    require(out, "out");
    if (i >= d->set.items.size()) snk::throw_config("detection index out of range");
    const snk::Detection& x = d->set.items[i];
    for (int a = 0; a < 3; ++a) out->center[a] = x.center[a];
    out->radius = x.radius;
    out->energy = x.energy;
    out->iterations = x.iterations;
    out->converged = x.converged ? 1 : 0;
  });
}

snk_status snk_detections_write_csv(const snk_detections* d, const char* path) {
  return guarded([&] {
    require(d, "detections");
    require(path, "path");
    snk::write_detections_csv(d->set, path);
  });
}

snk_status snk_detections_read_csv(const char* path, snk_detections** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = wrap(snk::read_detections_csv(path));
  });
}

const char* snk_detections_csv(const snk_detections* d) { return d ? d->csv.c_str() : ""; }

void snk_detections_free(snk_detections* d) { delete d; }

snk_status snk_evaluate(const snk_detections* d, const snk_points* truth, double tau, const char* report_path,
                        snk_eval_result* out) {
  return guarded([&] {
    require(d, "detections");
    require(truth, "truth");
    if (tau == 0.0) tau = snk::nominal_tau(truth->p);
    const snk::EvalResult r = snk::match_detections(d->set, truth->p, tau);
    if (report_path != nullptr) {
      std::ofstream f(report_path);
      if (!f) snk::throw_io(std::string("cannot write '") + report_path + "'");
      f << snk::format_report(r, tau);
    }
    if (out) {
      out->tp = r.tp;
      out->fp = r.fp;
      out->fn = r.fn;
      out->precision = r.precision;
      out->recall = r.recall;
      out->f_measure = r.f_measure;
    }
  });
}

double snk_f_measure(double precision, double recall) { return snk::f_measure(precision, recall); }

}  // extern "C"
