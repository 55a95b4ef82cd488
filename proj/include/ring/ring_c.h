/* Copyright 2026 The RING Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

/* C interface to the RING library.
 *
 * All objects are opaque handles created by a ring_*_create/_read/_init
 * function and released with the matching ring_*_free. Every fallible call
 * returns a ring_status; on failure a description is available from
 * ring_last_error() on the calling thread until the next failing call.
 *
 * Array layouts are row-major:
 *   inputs  T x N x 10  (gyro xyz, acc xyz, joint axis xyz, 1/F)
 *   targets T x N x 4   (unit quaternion w, x, y, z; body -> parent)
 * Parent arrays use 1-based body numbers with 0 for the earth frame.
 */

#ifndef RING_RING_C_H_
#define RING_RING_C_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define RING_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define RING_API __attribute__((visibility("default")))
#else
#  define RING_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ring_status {
  RING_OK = 0,
  RING_ERR_INVALID_ARGUMENT = 1,
  RING_ERR_IO = 2,
  RING_ERR_FORMAT = 3,
  RING_ERR_CHECKSUM = 4,
  RING_ERR_INVARIANT = 5,
  RING_ERR_SHAPE_MISMATCH = 6,
  RING_ERR_NON_FINITE = 7,
  RING_ERR_DIVERGED = 8,
  RING_ERR_UNSTABLE = 9,
  RING_ERR_INTERNAL = 100
} ring_status;

typedef struct ring_dataset ring_dataset;
typedef struct ring_model ring_model;
typedef struct ring_stepper ring_stepper;

RING_API const char* ring_version(void);
RING_API const char* ring_last_error(void);
RING_API const char* ring_status_name(ring_status status);

/* ---- datasets ---------------------------------------------------------- */

typedef struct ring_generate_options {
  uint64_t seed;
  size_t count;
  size_t timesteps;
  const double* rates; /* sampling rates in Hz, drawn uniformly per sequence */
  size_t rate_count;
  size_t bodies;       /* chain length; parent array (0, 1, ..., N-1) */
  int nonrigid;
  int misaligned;      /* joint axes unknown */
  int sparse;          /* IMUs only on the first and last body */
  int imu_noise;
  const char* ranges_path; /* optional key = value ranges file, NULL for defaults */
  size_t threads;          /* worker threads; output does not depend on it */
} ring_generate_options;

/* 512 sequences of 6000 steps at 40..200 Hz, three-body chain, noise on. */
RING_API void ring_generate_options_default(ring_generate_options* options);

RING_API ring_status ring_dataset_generate(const ring_generate_options* options, ring_dataset** out);
RING_API ring_status ring_dataset_read(const char* path, ring_dataset** out);
RING_API ring_status ring_dataset_write(const ring_dataset* dataset, const char* path);
/* Copy of sequences [first, first + count). */
RING_API ring_status ring_dataset_slice(const ring_dataset* dataset, size_t first, size_t count,
                                        ring_dataset** out);
RING_API size_t ring_dataset_count(const ring_dataset* dataset);
RING_API ring_status ring_dataset_info(const ring_dataset* dataset, size_t index, size_t* timesteps,
                                       size_t* bodies, double* rate);
RING_API ring_status ring_dataset_parents(const ring_dataset* dataset, size_t index, int* parents);
RING_API ring_status ring_dataset_inputs(const ring_dataset* dataset, size_t index, double* x);
RING_API ring_status ring_dataset_targets(const ring_dataset* dataset, size_t index, double* y);
RING_API void ring_dataset_free(ring_dataset* dataset);

/* ---- models ------------------------------------------------------------ */

RING_API ring_status ring_model_init(size_t hidden, size_t message, uint64_t seed, ring_model** out);
/* hidden/message of 0 accept whatever the file holds. */
RING_API ring_status ring_model_read(const char* path, size_t hidden, size_t message, ring_model** out);
RING_API ring_status ring_model_write(const ring_model* model, const char* path);
RING_API ring_status ring_model_dims(const ring_model* model, size_t* hidden, size_t* message,
                                     size_t* parameter_count);
RING_API void ring_model_free(ring_model* model);

/* ---- training ---------------------------------------------------------- */

typedef struct ring_train_options {
  size_t hidden;
  size_t message;
  size_t batch_size;
  size_t steps;
  double learning_rate;
  int cosine_decay;
  double clip_norm;
  double warmup_s;
  size_t truncation;       /* 0: full backpropagation through time */
  size_t validation_every; /* 0: no periodic validation */
  double validation_exclude_s;
  uint64_t seed;
  size_t threads; /* gradient shards evaluated concurrently */
} ring_train_options;

RING_API void ring_train_options_default(ring_train_options* options);

/* val_mae_deg is negative when no validation ran at this step. */
typedef void (*ring_train_callback)(size_t step, double loss, double val_mae_deg, double wall_s,
                                    void* user);

/* validation may be NULL. */
RING_API ring_status ring_train(const ring_train_options* options, const ring_dataset* train,
                                const ring_dataset* validation, ring_train_callback callback,
                                void* user, ring_model** out);

/* ---- inference and evaluation ----------------------------------------- */

/* y: T x N x 4 for sequence `index`. */
RING_API ring_status ring_predict(const ring_model* model, const ring_dataset* dataset, size_t index,
                                  double* y);

typedef struct ring_mae {
  double mean_deg;
  double std_deg; /* across sequences */
  size_t trials;
} ring_mae;

typedef enum ring_baseline {
  RING_BASELINE_IDENTITY = 0,
  RING_BASELINE_DEAD_RECKONING = 1
} ring_baseline;

RING_API ring_status ring_eval_mae(const ring_model* model, const ring_dataset* dataset, double exclude_s,
                                   ring_mae* out);
RING_API ring_status ring_eval_baseline_mae(ring_baseline baseline, const ring_dataset* dataset,
                                            double exclude_s, ring_mae* out);
/* rows: one entry per rate. */
RING_API ring_status ring_eval_rate_sweep(const ring_model* model, const ring_dataset* dataset,
                                          const double* rates, size_t rate_count, double exclude_s,
                                          ring_mae* rows);
/* rows[8] in (nonrigid, misaligned, sparse) order 000, 001, 010, 011, 100,
   101, 110, 111; one generated three-body sequence per seed and row. */
RING_API ring_status ring_eval_ablation(const ring_model* model, const uint64_t* seeds, size_t seed_count,
                                        size_t timesteps, double rate, double exclude_s, int imu_noise,
                                        ring_mae* rows);

/* ---- online stepping --------------------------------------------------- */

RING_API ring_status ring_stepper_create(const ring_model* model, const int* parents, size_t bodies,
                                         ring_stepper** out);
/* x: N x 10, y: N x 4. */
RING_API ring_status ring_stepper_step(ring_stepper* stepper, const double* x, double* y);
RING_API void ring_stepper_reset(ring_stepper* stepper);
RING_API void ring_stepper_free(ring_stepper* stepper);

#ifdef __cplusplus
}
#endif

#endif /* RING_RING_C_H_ */
