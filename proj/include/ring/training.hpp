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

// Orientation loss, backpropagation through time and the training loop.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ring/kinematics.hpp"
#include "ring/net.hpp"
#include "ring/quat.hpp"
#include "ring/rcmg.hpp"

namespace ring {

// Mean over t >= warmup and all bodies of the squared angle (rad^2).
// Bodies attached to earth compare inclinations only.
double orientation_loss(std::span<const Quat> estimate, std::span<const Quat> truth, std::size_t T,
                        const ParentArray& lambda, std::size_t warmup);

struct LossGradient {
  double loss = 0.0;
  // dLoss/dEstimate per entry, projected onto the tangent space of the unit
  // sphere at the estimate.
  std::vector<std::array<double, 4>> d_estimate;
};

LossGradient orientation_loss_gradient(std::span<const Quat> estimate, std::span<const Quat> truth,
                                       std::size_t T, const ParentArray& lambda, std::size_t warmup);

// Warm-up steps for a sequence at rate F: ceil(warmup_s * F).
std::size_t warmup_steps(double warmup_s, double F);

struct BatchGradient {
  double loss = 0.0;  // mean of per-sequence losses
  RingParams grad;
};

// Exact reverse-mode gradient of the mean per-sequence loss over the batch.
// All pairs must share T. truncation > 0 splits the unroll into segments of
// that many steps: the state is carried forward and gradients stop at
// segment boundaries. threads > 1 splits the batch into contiguous shards
// evaluated concurrently. Throws ErrorCode::kNonFinite naming the offending
// parameter block.
BatchGradient loss_gradient(const RingParams& params, std::span<const TrainingPair* const> batch,
                            double warmup_s, std::size_t truncation = 0, std::size_t threads = 1);

struct TrainConfig {
  std::size_t hidden = 32;
  std::size_t message = 16;
  std::size_t batch_size = 32;
  std::size_t steps = 1000;
  double learning_rate = 3e-4;
  bool cosine_decay = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 1.0;
  double warmup_s = 5.0;
  std::size_t truncation = 0;
  std::size_t validation_every = 0;  // 0 disables periodic validation
  double validation_exclude_s = 5.0;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct TrainRecord {
  std::size_t step = 0;
  double loss = 0.0;
  double validation_mae_deg = -1.0;  // negative when not evaluated at this step
  double wall_s = 0.0;
};

// One JSON object per line.
std::string format_train_record(const TrainRecord& r);

struct TrainResult {
  RingParams params;
  std::vector<TrainRecord> log;
};

using TrainCallback = std::function<void(const TrainRecord&)>;

// Adam with global-norm clipping and optional cosine decay over
// config.steps. Minibatches are drawn from `train_set` in a seeded
// shuffled order; validation MAE uses `validation_set` when non-empty.
// Throws ErrorCode::kDiverged on a non-finite loss.
TrainResult train(const TrainConfig& config, std::span<const TrainingPair> train_set,
                  std::span<const TrainingPair> validation_set = {},
                  const TrainCallback& on_record = {});

// Same, starting from the given parameters instead of init_params.
TrainResult train_from(const TrainConfig& config, RingParams initial,
                       std::span<const TrainingPair> train_set,
                       std::span<const TrainingPair> validation_set = {},
                       const TrainCallback& on_record = {});

}  // namespace ring
