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

#include "ring/ring_c.h"

#include <algorithm>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ring/error.hpp"
#include "ring/eval.hpp"
#include "ring/io.hpp"
#include "ring/net.hpp"
#include "ring/rcmg.hpp"
#include "ring/training.hpp"

struct ring_dataset {
  std::vector<ring::TrainingPair> pairs;
};

struct ring_model {
  ring::RingParams params;
};

struct ring_stepper {
  ring::RingStepper stepper;
};

namespace {

thread_local std::string g_last_error;

ring_status to_status(ring::ErrorCode code) {
  switch (code) {
    case ring::ErrorCode::kInvalidArgument: return RING_ERR_INVALID_ARGUMENT;
    case ring::ErrorCode::kIo: return RING_ERR_IO;
    case ring::ErrorCode::kFormat: return RING_ERR_FORMAT;
    case ring::ErrorCode::kChecksum: return RING_ERR_CHECKSUM;
    case ring::ErrorCode::kInvariant: return RING_ERR_INVARIANT;
    case ring::ErrorCode::kShapeMismatch: return RING_ERR_SHAPE_MISMATCH;
    case ring::ErrorCode::kNonFinite: return RING_ERR_NON_FINITE;
    case ring::ErrorCode::kDiverged: return RING_ERR_DIVERGED;
    case ring::ErrorCode::kUnstable: return RING_ERR_UNSTABLE;
  }
  return RING_ERR_INTERNAL;
}

template <typename F>
ring_status guarded(F&& body) {
  try {
    body();
    return RING_OK;
  } catch (const ring::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RING_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RING_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) ring::fail(ring::ErrorCode::kInvalidArgument, what);
}

const ring::TrainingPair& pair_at(const ring_dataset* d, std::size_t index) {
  require(d != nullptr, "dataset is null");
  require(index < d->pairs.size(), "sequence index out of range");
  return d->pairs[index];
}

void copy_quats(const std::vector<ring::Quat>& q, double* y) {
  for (std::size_t k = 0; k < q.size(); ++k) {
    y[4 * k + 0] = q[k].w;
    y[4 * k + 1] = q[k].x;
    y[4 * k + 2] = q[k].y;
    y[4 * k + 3] = q[k].z;
  }
}

ring_mae to_mae(const ring::Summary& s) { return {s.mean, s.std, s.count}; }

}  // namespace

extern "C" {

const char* ring_version(void) { return "1.0.0"; }

const char* ring_last_error(void) { return g_last_error.c_str(); }

const char* ring_status_name(ring_status status) {
  switch (status) {
    case RING_OK: return "ok";
    case RING_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RING_ERR_IO: return "i/o error";
    case RING_ERR_FORMAT: return "format error";
    case RING_ERR_CHECKSUM: return "checksum error";
    case RING_ERR_INVARIANT: return "invariant violation";
    case RING_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case RING_ERR_NON_FINITE: return "non-finite value";
    case RING_ERR_DIVERGED: return "training diverged";
    case RING_ERR_UNSTABLE: return "unstable simulation";
    case RING_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void ring_generate_options_default(ring_generate_options* o) {
  static const double kRates[] = {40, 60, 80, 100, 120, 140, 160, 180, 200};
  if (o == nullptr) return;
  *o = {};
  o->seed = 0;
  o->count = 512;
  o->timesteps = 6000;
  o->rates = kRates;
  o->rate_count = sizeof(kRates) / sizeof(kRates[0]);
  o->bodies = 3;
  o->imu_noise = 1;
  o->threads = 1;
}

ring_status ring_dataset_generate(const ring_generate_options* o, ring_dataset** out) {
  return guarded([&] {
    require(o != nullptr && out != nullptr, "null argument");
    require(o->rates != nullptr && o->rate_count > 0, "rate set is empty");
    require(o->bodies >= 1, "bodies must be >= 1");
    ring::GeneratorOptions g;
    g.timesteps = o->timesteps;
    g.rate_set.assign(o->rates, o->rates + o->rate_count);
    g.lambda = ring::ParentArray::chain(o->bodies);
    g.flags = {o->nonrigid != 0, o->misaligned != 0, o->sparse != 0};
    g.imu_noise = o->imu_noise != 0;
    g.threads = o->threads;
    if (o->ranges_path != nullptr) g.ranges = ring::load_ranges(o->ranges_path);
    auto d = std::make_unique<ring_dataset>();
    d->pairs = ring::generate_batch(o->seed, o->count, g);
    *out = d.release();
  });
}

ring_status ring_dataset_read(const char* path, ring_dataset** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto d = std::make_unique<ring_dataset>();
    d->pairs = ring::read_dataset(path);
    *out = d.release();
  });
}

ring_status ring_dataset_write(const ring_dataset* d, const char* path) {
  return guarded([&] {
    require(d != nullptr && path != nullptr, "null argument");
    ring::write_dataset(path, d->pairs);
  });
}

ring_status ring_dataset_slice(const ring_dataset* d, size_t first, size_t count, ring_dataset** out) {
  return guarded([&] {
    require(d != nullptr && out != nullptr, "null argument");
    require(first <= d->pairs.size() && count <= d->pairs.size() - first, "slice out of range");
    auto s = std::make_unique<ring_dataset>();
    s->pairs.assign(d->pairs.begin() + static_cast<std::ptrdiff_t>(first),
                    d->pairs.begin() + static_cast<std::ptrdiff_t>(first + count));
    *out = s.release();
  });
}

size_t ring_dataset_count(const ring_dataset* d) { return d == nullptr ? 0 : d->pairs.size(); }

ring_status ring_dataset_info(const ring_dataset* d, size_t index, size_t* T, size_t* N, double* F) {
  return guarded([&] {
    const auto& p = pair_at(d, index);
    if (T != nullptr) *T = p.T;
    if (N != nullptr) *N = p.N;
    if (F != nullptr) *F = p.F;
  });
}

ring_status ring_dataset_parents(const ring_dataset* d, size_t index, int* parents) {
  return guarded([&] {
    const auto& p = pair_at(d, index);
    require(parents != nullptr, "null argument");
    for (std::size_t i = 0; i < p.N; ++i) parents[i] = p.lambda.parents[i];
  });
}

ring_status ring_dataset_inputs(const ring_dataset* d, size_t index, double* x) {
  return guarded([&] {
    const auto& p = pair_at(d, index);
    require(x != nullptr, "null argument");
    std::copy(p.X.begin(), p.X.end(), x);
  });
}

ring_status ring_dataset_targets(const ring_dataset* d, size_t index, double* y) {
  return guarded([&] {
    const auto& p = pair_at(d, index);
    require(y != nullptr, "null argument");
    copy_quats(p.Y, y);
  });
}

void ring_dataset_free(ring_dataset* d) { delete d; }

ring_status ring_model_init(size_t hidden, size_t message, uint64_t seed, ring_model** out) {
  return guarded([&] {
    require(out != nullptr, "null argument");
    require(hidden >= 1, "hidden width must be >= 1");
    *out = new ring_model{ring::init_params(hidden, message, seed)};
  });
}

ring_status ring_model_read(const char* path, size_t hidden, size_t message, ring_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new ring_model{ring::read_weights(path, hidden, message)};
  });
}

ring_status ring_model_write(const ring_model* m, const char* path) {
  return guarded([&] {
    require(m != nullptr && path != nullptr, "null argument");
    ring::write_weights(path, m->params);
  });
}

ring_status ring_model_dims(const ring_model* m, size_t* hidden, size_t* message, size_t* count) {
  return guarded([&] {
    require(m != nullptr, "null argument");
    if (hidden != nullptr) *hidden = m->params.hidden();
    if (message != nullptr) *message = m->params.message();
    if (count != nullptr) *count = m->params.size();
  });
}

void ring_model_free(ring_model* m) { delete m; }

void ring_train_options_default(ring_train_options* o) {
  if (o == nullptr) return;
  const ring::TrainConfig c;
  *o = {};
  o->hidden = c.hidden;
  o->message = c.message;
  o->batch_size = c.batch_size;
  o->steps = c.steps;
  o->learning_rate = c.learning_rate;
  o->cosine_decay = c.cosine_decay ? 1 : 0;
  o->clip_norm = c.clip_norm;
  o->warmup_s = c.warmup_s;
  o->truncation = c.truncation;
  o->validation_every = c.validation_every;
  o->validation_exclude_s = c.validation_exclude_s;
  o->seed = c.seed;
  o->threads = c.threads;
}

ring_status ring_train(const ring_train_options* o, const ring_dataset* train,
                       const ring_dataset* validation, ring_train_callback callback, void* user,
                       ring_model** out) {
  return guarded([&] {
    require(o != nullptr && train != nullptr && out != nullptr, "null argument");
    ring::TrainConfig c;
    c.hidden = o->hidden;
    c.message = o->message;
    c.batch_size = o->batch_size;
    c.steps = o->steps;
    c.learning_rate = o->learning_rate;
    c.cosine_decay = o->cosine_decay != 0;
    c.clip_norm = o->clip_norm;
    c.warmup_s = o->warmup_s;
    c.truncation = o->truncation;
    c.validation_every = o->validation_every;
    c.validation_exclude_s = o->validation_exclude_s;
    c.seed = o->seed;
    c.threads = o->threads;
    ring::TrainCallback cb;
    if (callback != nullptr)
      cb = [&](const ring::TrainRecord& r) { callback(r.step, r.loss, r.validation_mae_deg, r.wall_s, user); };
    static const std::vector<ring::TrainingPair> kNone;
    const auto& val = validation != nullptr ? validation->pairs : kNone;
    auto result = ring::train(c, train->pairs, val, cb);
    *out = new ring_model{std::move(result.params)};
  });
}

ring_status ring_predict(const ring_model* m, const ring_dataset* d, size_t index, double* y) {
  return guarded([&] {
    require(m != nullptr && y != nullptr, "null argument");
    copy_quats(ring::ring_apply(pair_at(d, index), m->params), y);
  });
}

ring_status ring_eval_mae(const ring_model* m, const ring_dataset* d, double exclude_s, ring_mae* out) {
  return guarded([&] {
    require(m != nullptr && d != nullptr && out != nullptr, "null argument");
    *out = to_mae(ring::evaluate(m->params, d->pairs, exclude_s));
  });
}

ring_status ring_eval_baseline_mae(ring_baseline baseline, const ring_dataset* d, double exclude_s,
                                   ring_mae* out) {
  return guarded([&] {
    require(d != nullptr && out != nullptr, "null argument");
    std::vector<double> maes;
    for (const auto& p : d->pairs) {
      std::vector<ring::Quat> est;
      switch (baseline) {
        case RING_BASELINE_IDENTITY: est = ring::identity_prediction(p); break;
        case RING_BASELINE_DEAD_RECKONING: est = ring::dead_reckoning(p); break;
        default: require(false, "unknown baseline");
      }
      maes.push_back(ring::mae_deg(est, p.Y, p.T, p.lambda, p.F, exclude_s).mean_deg);
    }
    *out = to_mae(ring::summarize(maes));
  });
}

ring_status ring_eval_rate_sweep(const ring_model* m, const ring_dataset* d, const double* rates,
                                 size_t rate_count, double exclude_s, ring_mae* rows) {
  return guarded([&] {
    require(m != nullptr && d != nullptr && rates != nullptr && rows != nullptr, "null argument");
    const auto sweep = ring::rate_sweep(m->params, d->pairs, std::span<const double>(rates, rate_count), exclude_s);
    for (std::size_t k = 0; k < sweep.size(); ++k) rows[k] = to_mae(sweep[k].mae);
  });
}

ring_status ring_eval_ablation(const ring_model* m, const uint64_t* seeds, size_t seed_count,
                               size_t timesteps, double rate, double exclude_s, int imu_noise,
                               ring_mae* rows) {
  return guarded([&] {
    require(m != nullptr && seeds != nullptr && rows != nullptr, "null argument");
    require(seed_count > 0, "at least one seed is required");
    ring::GeneratorOptions base;
    base.timesteps = timesteps;
    base.imu_noise = imu_noise != 0;
    const std::vector<std::uint64_t> s(seeds, seeds + seed_count);
    const auto grid = ring::ablation_grid(m->params, base, s, rate, exclude_s);
    for (std::size_t k = 0; k < grid.size(); ++k) rows[k] = to_mae(grid[k].mae);
  });
}

ring_status ring_stepper_create(const ring_model* m, const int* parents, size_t bodies, ring_stepper** out) {
  return guarded([&] {
    require(m != nullptr && parents != nullptr && out != nullptr, "null argument");
    ring::ParentArray lambda;
    lambda.parents.assign(parents, parents + bodies);
    *out = new ring_stepper{ring::RingStepper(m->params, std::move(lambda))};
  });
}

ring_status ring_stepper_step(ring_stepper* s, const double* x, double* y) {
  return guarded([&] {
    require(s != nullptr && x != nullptr && y != nullptr, "null argument");
    const std::size_t n = s->stepper.parents().size();
    const auto q = s->stepper.step(std::span<const double>(x, n * ring::kChannels));
    for (std::size_t k = 0; k < q.size(); ++k) {
      y[4 * k + 0] = q[k].w;
      y[4 * k + 1] = q[k].x;
      y[4 * k + 2] = q[k].y;
      y[4 * k + 3] = q[k].z;
    }
  });
}

void ring_stepper_reset(ring_stepper* s) {
  if (s != nullptr) s->stepper.reset();
}

void ring_stepper_free(ring_stepper* s) { delete s; }

}  // extern "C"
