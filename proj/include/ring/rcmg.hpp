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

// Random Chain Motion Generator: randomized chains, smooth random motions,
// spring-damper IMU attachment and IMU signal synthesis, assembled into
// (X, Y) training pairs that share a common number of timesteps.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ring/kinematics.hpp"
#include "ring/quat.hpp"

namespace ring {

inline constexpr std::size_t kChannels = 10;
inline constexpr std::size_t kInverseRateChannel = 9;
inline constexpr double kFineRate = 1000.0;  // Hz
inline constexpr double kGravity = 9.81;     // m/s^2

// Generator switches along the three ablation axes.
struct AblationFlags {
  bool nonrigid = false;
  bool misaligned = false;  // joint axes unknown: axis channels zeroed
  bool sparse = false;      // only the root and leaf bodies carry IMUs

  bool operator==(const AblationFlags&) const = default;
};

// Randomization ranges (SI units). Readable from a key = value text file,
// see docs/rcmg_config.md for the keys.
struct RandomizationRanges {
  double segment_length_min = 0.1;  // m
  double segment_length_max = 0.5;
  double imu_lateral_offset = 0.03;  // m, |y|, |z| of the IMU offset

  double joint_angle_range = kPi;  // waypoints uniform in [-range, range]
  double joint_rate_max = 10.0;    // rad/s
  double waypoint_interval_min = 0.5;  // s
  double waypoint_interval_max = 4.0;

  double base_tilt_range = 0.6;  // rad, pitch and roll waypoints
  double base_yaw_range = kPi;
  double base_rate_max = 3.0;          // rad/s per Euler angle
  double base_translation_range = 0.3; // m
  double base_speed_max = 1.0;         // m/s per axis

  double stiffness_t_min = 100.0;  // 1/s^2 (unit mass)
  double stiffness_t_max = 3600.0;
  double stiffness_r_min = 100.0;  // 1/s^2 (unit inertia)
  double stiffness_r_max = 3600.0;
  double damping_ratio_min = 0.1;  // damping = 2 * ratio * sqrt(stiffness)
  double damping_ratio_max = 10.0;

  double gyro_noise_max = 0.03;  // rad/s, per-sequence std drawn in [0, max]
  double acc_noise_max = 0.3;    // m/s^2
  double gyro_bias_max = 0.02;   // rad/s
  double acc_bias_max = 0.2;     // m/s^2
};

RandomizationRanges parse_ranges(std::istream& in);
RandomizationRanges load_ranges(const std::string& path);

struct MotionSequence {
  double fine_rate = kFineRate;
  double duration = 0.0;  // s
  std::vector<BodyPose> base_poses;
  std::vector<std::vector<double>> joint_angles;  // [body][sample]

  std::size_t samples() const { return base_poses.size(); }
};

struct ImuModel {
  Vec3 gravity{0.0, 0.0, kGravity};  // specific force of a static upright sensor
  double noise_std_gyro = 0.0;
  double noise_std_acc = 0.0;
  double bias_range_gyro = 0.0;
  double bias_range_acc = 0.0;
};

struct ImuSignals {
  std::vector<Vec3> gyro;  // rad/s, sensor frame
  std::vector<Vec3> acc;   // m/s^2, sensor frame
};

// Dense T x N x 10 input tensor and T x N target orientations.
struct TrainingPair {
  std::size_t T = 0;
  std::size_t N = 0;
  double F = 0.0;  // Hz
  ParentArray lambda;
  std::vector<double> X;  // row-major [t][i][c]
  std::vector<Quat> Y;    // row-major [t][i], Y = q_{i -> parent(i)}

  double& x(std::size_t t, std::size_t i, std::size_t c) { return X[(t * N + i) * kChannels + c]; }
  double x(std::size_t t, std::size_t i, std::size_t c) const { return X[(t * N + i) * kChannels + c]; }
  Quat& y(std::size_t t, std::size_t i) { return Y[t * N + i]; }
  const Quat& y(std::size_t t, std::size_t i) const { return Y[t * N + i]; }
};

// Throws ErrorCode::kInvariant on a layout or TrainingPair invariant violation.
void validate_training_pair(const TrainingPair& pair, double unit_tolerance = 1e-6);

// Deterministic sub-seed for stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

ChainConfig sample_chain_config(std::uint64_t seed, const AblationFlags& flags,
                                const ParentArray& lambda, const RandomizationRanges& ranges = {});

// Random-waypoint motion starting from the reference pose (all joint angles
// zero, base at the origin with identity orientation), sampled at kFineRate.
MotionSequence sample_motion(std::uint64_t seed, const ChainConfig& config,
                             const ParentArray& lambda, double duration,
                             const RandomizationRanges& ranges = {});

// World poses of every body at every fine sample.
std::vector<std::vector<BodyPose>> body_trajectories(const ChainConfig& config,
                                                     const ParentArray& lambda,
                                                     const MotionSequence& motion);

// IMU as a unit-mass, unit-inertia point body tied to its rigid pose by
// translational and rotational spring-dampers; semi-implicit Euler at
// fine_rate. Throws ErrorCode::kUnstable when the state becomes non-finite.
std::vector<BodyPose> simulate_nonrigid_imu(const std::vector<BodyPose>& body_poses,
                                            const NonrigidAttachment& attachment,
                                            double fine_rate);

// Throws ErrorCode::kInvalidArgument when F exceeds fine_rate. Output length
// is round(duration * F) where duration = (samples - 1) / fine_rate.
ImuSignals synthesize_imu(const std::vector<BodyPose>& imu_poses, double fine_rate, double F,
                          const ImuModel& model, std::uint64_t seed);

// One entry per body; bodies without an IMU may hold empty signals.
TrainingPair assemble_training_pair(const ChainConfig& config, const ParentArray& lambda,
                                    const MotionSequence& motion,
                                    const std::vector<ImuSignals>& imu, double F);

struct GeneratorOptions {
  std::size_t timesteps = 6000;
  std::vector<double> rate_set{40, 60, 80, 100, 120, 140, 160, 180, 200};
  AblationFlags flags;
  ParentArray lambda = ParentArray::chain(3);
  RandomizationRanges ranges;
  bool imu_noise = true;
  std::size_t threads = 1;  // workers for generate_batch; output does not depend on it
};

// Everything needed to regenerate one pair, exposed for oracles and tests.
struct GeneratedSequence {
  ChainConfig config;
  MotionSequence motion;
  std::vector<std::vector<BodyPose>> imu_poses;  // [body][fine sample], empty without IMU
  TrainingPair pair;
};

GeneratedSequence generate_sequence(std::uint64_t seed, double F, const GeneratorOptions& options);

// Pair k uses sub-seed derive_seed(seed, k) and a rate drawn uniformly from
// options.rate_set; duration = timesteps / F.
std::vector<TrainingPair> generate_batch(std::uint64_t seed, std::size_t count,
                                         const GeneratorOptions& options);

}  // namespace ring
