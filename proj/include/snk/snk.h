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

/*
 * C interface to the snakuscule engine. All objects are opaque handles
 * created by snk_* functions and released with the matching *_free call.
 * Functions return SNK_OK or an error status; the message of the most
 * recent failure on the calling thread is available from snk_last_error().
 */
#ifndef SNK_SNK_H
#define SNK_SNK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SNK_BUILDING_LIBRARY)
#    define SNK_API __declspec(dllexport)
#  else
#    define SNK_API __declspec(dllimport)
#  endif
#else
#  define SNK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command line tool. */
typedef enum snk_status {
  SNK_OK = 0,
  SNK_ERR_CONFIG = 2,
  SNK_ERR_IO = 3,
  SNK_ERR_INTERNAL = 4,
  SNK_ERR_EMPTY_DOMAIN = 5
} snk_status;

typedef enum snk_dtype { SNK_DTYPE_U8 = 0, SNK_DTYPE_U16 = 1, SNK_DTYPE_F32 = 2 } snk_dtype;
typedef enum snk_mode { SNK_MODE_GRID = 0, SNK_MODE_MC = 1 } snk_mode;
typedef enum snk_schedule { SNK_SCHEDULE_PER_SNAKE = 0, SNK_SCHEDULE_INTRA_SNAKE = 1 } snk_schedule;
typedef enum snk_ramp { SNK_RAMP_PROPORTIONAL = 0, SNK_RAMP_FIXED_VOXELS = 1 } snk_ramp;

typedef struct snk_volume snk_volume;
typedef struct snk_points snk_points;
typedef struct snk_detections snk_detections;

typedef struct snk_volume_info {
  int dim;
  size_t dims[3];
  double spacing[3];
  snk_dtype origin_dtype;
} snk_volume_info;

typedef struct snk_config {
  int dim;
  double r0;
  double eps0;
  int max_iters;
  double e0;
  int n_samples;
  snk_mode mode;
  uint64_t seed;
  double min_extent;
  double convergence_tol;
  snk_ramp ramp_mode;
  double ramp_width;
  int normalize_gradient;
  int redraw_samples;
  int cull_every;
  snk_schedule schedule;
  unsigned workers;
} snk_config;

typedef struct snk_detection {
  double center[3];
  double radius;
  double energy;
  int iterations;
  int converged;
} snk_detection;

typedef struct snk_run_stats {
  size_t snakes_initial;
  size_t collapsed;
  size_t runaway;
  size_t below_threshold;
  size_t detections;
  uint64_t iterations_total;
  double init_ms;
  double evolve_ms;
  double cull_ms;
} snk_run_stats;

typedef struct snk_eval_result {
  size_t tp;
  size_t fp;
  size_t fn;
  double precision;
  double recall;
  double f_measure;
} snk_eval_result;

SNK_API const char* snk_version(void);
SNK_API const char* snk_last_error(void);
SNK_API unsigned snk_hardware_workers(void);

/* Volumes. Raw files need a JSON sidecar next to them (same stem, .json);
 * .tif/.tiff files are read as page-per-slice stacks. `spacing` may be NULL,
 * otherwise it overrides the stored spacing (one value per axis). */
SNK_API snk_status snk_volume_load(const char* path, const double* spacing, snk_volume** out);
SNK_API snk_status snk_volume_save(const snk_volume* v, const char* path, snk_dtype dtype);
SNK_API snk_status snk_volume_save_tiff(const snk_volume* v, const char* path, snk_dtype dtype);
SNK_API snk_status snk_volume_info_get(const snk_volume* v, snk_volume_info* out);
SNK_API snk_status snk_volume_resample_isotropic(const snk_volume* v, double target_spacing, snk_volume** out);
SNK_API snk_status snk_volume_smooth(const snk_volume* v, double sigma, snk_volume** out);
SNK_API snk_status snk_volume_invert(const snk_volume* v, snk_volume** out);
SNK_API void snk_volume_free(snk_volume* v);

/* Synthetic sphere phantoms from a JSON description. When `seed` is NULL the
 * seed stored in the description is used (0 if absent). `warnings` may be
 * NULL; otherwise it receives the number of overlap warnings. */
SNK_API snk_status snk_phantom_generate(const char* spec_json, const uint64_t* seed, snk_volume** volume,
                                        snk_points** truth, size_t* warnings);

/* Point sets (ground-truth centres, optionally with nominal radii). */
SNK_API snk_status snk_points_read_csv(const char* path, snk_points** out);
SNK_API snk_status snk_points_write_csv(const snk_points* p, const char* path);
SNK_API size_t snk_points_count(const snk_points* p);
SNK_API int snk_points_dim(const snk_points* p);
SNK_API snk_status snk_points_get(const snk_points* p, size_t i, double xyz[3]);
SNK_API void snk_points_free(snk_points* p);

/* Segmentation. */
SNK_API void snk_config_default(snk_config* cfg, int dim);
SNK_API snk_status snk_config_validate(const snk_config* cfg);
SNK_API snk_status snk_segment(const snk_volume* v, const snk_config* cfg, snk_detections** out,
                               snk_run_stats* stats);

SNK_API size_t snk_detections_count(const snk_detections* d);
SNK_API int snk_detections_dim(const snk_detections* d);
SNK_API snk_status snk_detections_get(const snk_detections* d, size_t i, snk_detection* out);
SNK_API snk_status snk_detections_write_csv(const snk_detections* d, const char* path);
SNK_API snk_status snk_detections_read_csv(const char* path, snk_detections** out);
/* CSV text of the set; the pointer stays valid until the set is freed. */
SNK_API const char* snk_detections_csv(const snk_detections* d);
SNK_API void snk_detections_free(snk_detections* d);

/* Evaluation against ground truth. `report_path` may be NULL. A `tau` of 0
 * selects the smallest nominal radius stored with the truth points (the r0
 * column written for phantoms); sets without radii then fail. */
SNK_API snk_status snk_evaluate(const snk_detections* d, const snk_points* truth, double tau,
                                const char* report_path, snk_eval_result* out);
SNK_API double snk_f_measure(double precision, double recall);

#ifdef __cplusplus
}
#endif

#endif /* SNK_SNK_H */
