/*
 * Copyright 2026 The epialign Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the epialign core. All handles are opaque and owned by the
 * caller once returned; release them with the matching *_free function.
 * Functions return EPI_OK or an error status, and the message of the most
 * recent failure on the calling thread is available from epi_last_error().
 * Strings returned through char** are released with epi_string_free(). */

#ifndef EPIALIGN_EPIALIGN_H_
#define EPIALIGN_EPIALIGN_H_

#include <stddef.h>
#include <stdint.h>

#if defined(EPIALIGN_BUILDING_LIBRARY)
#define EPI_API __attribute__((visibility("default")))
#else
#define EPI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum epi_status {
  EPI_OK = 0,
  EPI_ERR_INVALID_ARGUMENT = 1,
  EPI_ERR_DEGENERATE_ROTATION_6D = 2,
  EPI_ERR_DEGENERATE_BASELINE = 3,
  EPI_ERR_DEGENERATE_EPIPOLAR_LINE = 4,
  EPI_ERR_INVALID_DEPTH = 5,
  EPI_ERR_INSUFFICIENT_FRAMES = 6,
  EPI_ERR_EMPTY_RESIDUALS = 7,
  EPI_ERR_MISSING_CONFIDENCE = 8,
  EPI_ERR_ZERO_TOTAL_WEIGHT = 9,
  EPI_ERR_INSUFFICIENT_CORRESPONDENCES = 10,
  EPI_ERR_FRAME_MISMATCH = 11,
  EPI_ERR_EMPTY_SEQUENCE = 12,
  EPI_ERR_DEGENERATE_TRAJECTORY = 13,
  EPI_ERR_EMPTY_CLOUD = 14,
  EPI_ERR_MISSING_DEPTH_MAP = 15,
  EPI_ERR_NO_COVISIBILITY = 16,
  EPI_ERR_PARSE = 17,
  EPI_ERR_VERSION_MISMATCH = 18,
  EPI_ERR_ROTATION_INVALID = 19,
  EPI_ERR_IO = 20,
  EPI_ERR_INVALID_CORRESPONDENCE = 21,
  EPI_ERR_INTERNAL = 22
} epi_status;

typedef enum epi_residual_mode {
  EPI_RESIDUAL_GEOMETRIC = 0,
  EPI_RESIDUAL_ALGEBRAIC = 1
} epi_residual_mode;

typedef enum epi_weighting {
  EPI_WEIGHTING_ADAPTIVE = 0,
  EPI_WEIGHTING_UNIFORM = 1,
  EPI_WEIGHTING_CONFIDENCE = 2
} epi_weighting;

typedef struct epi_rig epi_rig;
typedef struct epi_matches epi_matches;
typedef struct epi_cloud epi_cloud;
typedef struct epi_weights epi_weights;

EPI_API const char* epi_version(void);
EPI_API const char* epi_status_name(epi_status status);
/* Process exit code for a status: 0 ok, 2 usage, 3 data, 4 numerical. */
EPI_API int epi_status_exit_code(epi_status status);
/* Message of the last failure on this thread; "" after success. */
EPI_API const char* epi_last_error(void);
EPI_API void epi_string_free(char* text);

/* Camera rigs (JSON, world-to-camera). */
EPI_API epi_status epi_rig_load(const char* path, epi_rig** out);
EPI_API epi_status epi_rig_save(const epi_rig* rig, const char* path);
EPI_API size_t epi_rig_frame_count(const epi_rig* rig);
/* R row-major. */
EPI_API epi_status epi_rig_pose(const epi_rig* rig, size_t frame, double R[9],
                                double t[3]);
/* fx, fy, cx, cy and width, height. */
EPI_API epi_status epi_rig_intrinsics(const epi_rig* rig, size_t frame,
                                      double k[4], int size[2]);
EPI_API void epi_rig_free(epi_rig* rig);

/* Binary correspondence files. */
EPI_API epi_status epi_matches_load(const char* path, epi_matches** out);
EPI_API epi_status epi_matches_save(const epi_matches* matches, const char* path);
EPI_API size_t epi_matches_pair_count(const epi_matches* matches);
EPI_API size_t epi_matches_correspondence_count(const epi_matches* matches);
EPI_API void epi_matches_free(epi_matches* matches);

/* Point clouds (PLY). */
EPI_API epi_status epi_cloud_load(const char* path, epi_cloud** out);
EPI_API epi_status epi_cloud_save(const epi_cloud* cloud, const char* path);
EPI_API size_t epi_cloud_size(const epi_cloud* cloud);
EPI_API epi_status epi_cloud_point(const epi_cloud* cloud, size_t index,
                                   double xyz[3]);
EPI_API epi_status epi_random_cloud(const epi_rig* rig, size_t count,
                                    uint64_t seed, epi_cloud** out);
EPI_API void epi_cloud_free(epi_cloud* cloud);

/* Per-correspondence weights (CSV), aligned with a match set. */
EPI_API epi_status epi_weights_load(const char* path, const epi_matches* matches,
                                    epi_weights** out);
EPI_API size_t epi_weights_size(const epi_weights* weights);
EPI_API void epi_weights_free(epi_weights* weights);

typedef struct epi_align_options {
  int iterations;
  double lr0, lr1, lr2;
  double b1, b2; /* px */
  double alpha;
  double pair_angle_deg;
  size_t max_matches;
  size_t histogram_bins;
  size_t gauge_frame;
  int reweight_every; /* 0 freezes the weights */
  int optimize_focal;
  epi_residual_mode residual_mode;
  epi_weighting weighting;
  uint64_t seed;
} epi_align_options;

EPI_API void epi_align_options_init(epi_align_options* options);

/* Refines `rig` against `matches`; *report_json receives the run report. */
EPI_API epi_status epi_align(const epi_rig* rig, const epi_matches* matches,
                             const epi_align_options* options, epi_rig** refined,
                             char** report_json);

/* Residuals and weights of every correspondence under `rig`. Writes the
 * weight CSV and, when histogram_csv is not NULL, the histogram CSV. */
EPI_API epi_status epi_compute_weights(const epi_rig* rig,
                                       const epi_matches* matches,
                                       const epi_align_options* options,
                                       const char* weights_csv,
                                       const char* histogram_csv,
                                       char** report_json);

/* Pose metrics of `pred` against `gt` (frames matched by id) plus ATE.
 * trajectory_csv may be NULL. */
EPI_API epi_status epi_eval_pose(const epi_rig* pred, const epi_rig* gt,
                                 int order_invariant, const char* trajectory_csv,
                                 char** report_json);

/* Chamfer metrics. When both rigs are given, pred is first mapped through the
 * similarity aligning pred_cameras to gt_cameras. */
EPI_API epi_status epi_eval_points(const epi_cloud* pred, const epi_cloud* gt,
                                   const epi_rig* pred_cameras,
                                   const epi_rig* gt_cameras, char** report_json);

/* Unprojects both endpoints of every correspondence with weight > threshold
 * using `<depth_dir>/<frame id>.pfm`. */
EPI_API epi_status epi_select_points(const epi_rig* rig,
                                     const epi_matches* matches,
                                     const epi_weights* weights,
                                     const char* depth_dir, double threshold,
                                     epi_cloud** out, char** report_json);

/* Synthetic dataset from a JSON config file into out_dir. A non-NULL seed
 * overrides the config's seed. */
EPI_API epi_status epi_synth(const char* config_path, const char* out_dir,
                             const uint64_t* seed, char** report_json);

/* COLMAP text model; cloud may be NULL. */
EPI_API epi_status epi_export_colmap(const epi_rig* rig, const epi_cloud* cloud,
                                     const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* EPIALIGN_EPIALIGN_H_ */
