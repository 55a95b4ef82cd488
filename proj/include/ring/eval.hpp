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

// Evaluation: MAE with warm-up exclusion, resampling, dead reckoning,
// sampling-rate sweeps and the ablation grid.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ring/kinematics.hpp"
#include "ring/net.hpp"
#include "ring/quat.hpp"
#include "ring/rcmg.hpp"

namespace ring {

inline constexpr Vec3 kWorldUp{0.0, 0.0, 1.0};
inline constexpr double kDefaultExcludeSeconds = 5.0;

// Inclination of a body-to-world orientation (heading about world up removed).
Quat inclination(const Quat& q);

// Angle used for body i: full relative angle for bodies with a parent body,
// inclination-only angle for bodies attached to earth.
double body_angle_rad(const Quat& estimate, const Quat& truth, bool attached_to_earth);

struct MaeResult {
  double mean_deg = 0.0;
  std::vector<double> per_body_deg;
  std::size_t first_step = 0;  // first timestep included
};

// Mean absolute angle (deg) over t >= ceil(exclude_s * F) and all bodies.
// Throws ErrorCode::kInvalidArgument when the exclusion consumes the sequence.
MaeResult mae_deg(std::span<const Quat> estimate, std::span<const Quat> truth, std::size_t T,
                  const ParentArray& lambda, double F, double exclude_s = kDefaultExcludeSeconds);

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

// Resample to F_new: input channels band-limited and interpolated, targets by
// shortest-arc interpolation, channel 9 rewritten. T_new = round(T F_new / F).
TrainingPair resample(const TrainingPair& pair, double F_new);

// Strapdown gyro integration from identity per IMU; relative orientations by
// composition. Bodies (or parents) without an IMU are predicted as identity.
std::vector<Quat> dead_reckoning(const TrainingPair& pair);

// Identity prediction for every body and timestep.
std::vector<Quat> identity_prediction(const TrainingPair& pair);

// MAE of one parameter set over a test set.
Summary evaluate(const RingParams& params, std::span<const TrainingPair> pairs,
                 double exclude_s = kDefaultExcludeSeconds);

struct SweepRow {
  double rate = 0.0;
  Summary mae;
};

std::vector<SweepRow> rate_sweep(const RingParams& params, std::span<const TrainingPair> pairs,
                                 std::span<const double> rates,
                                 double exclude_s = kDefaultExcludeSeconds);

struct AblationRow {
  AblationFlags flags;
  Summary mae;
};

// Eight flag combinations, nonrigid major and sparse minor:
// (0,0,0) (0,0,1) (0,1,0) (0,1,1) (1,0,0) (1,0,1) (1,1,0) (1,1,1)
// as (nonrigid, misaligned, sparse).
std::vector<AblationFlags> ablation_flag_grid();

// One generated test sequence per seed and flag cell at rate F.
std::vector<AblationRow> ablation_grid(const RingParams& params, const GeneratorOptions& base,
                                       std::span<const std::uint64_t> seeds, double F,
                                       double exclude_s = kDefaultExcludeSeconds);

std::string format_sweep_table(std::span<const SweepRow> rows, char delimiter = ',');
std::string format_ablation_table(std::span<const AblationRow> rows, char delimiter = ',');

}  // namespace ring
