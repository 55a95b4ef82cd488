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

#include "ring/rcmg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <random>
#include <sstream>

#include "ring/error.hpp"
#include "ring/signal.hpp"
#include "parallel.hpp"

namespace ring {
namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

Vec3 random_unit_vector(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    const Vec3 v{gauss(rng), gauss(rng), gauss(rng)};
    const double n = norm(v);
    if (n > 1e-6) return v / n;
  }
}

// Waypoints every U[interval_min, interval_max] seconds, values uniform in
// [-range, range] with steps limited so the cosine blend never exceeds
// rate_max. Starts at zero.
std::vector<double> waypoint_trajectory(Rng& rng, std::size_t samples, double rate, double range,
                                        double rate_max, double interval_min,
                                        double interval_max) {
  std::vector<double> out(samples, 0.0);
  double t0 = 0.0;
  double v0 = 0.0;
  std::size_t n = 0;
  while (n < samples) {
    const double dt = uniform(rng, interval_min, interval_max);
    const double max_step = 2.0 * rate_max * dt / kPi;
    const double target = uniform(rng, -range, range);
    const double v1 = v0 + std::clamp(target - v0, -max_step, max_step);
    const double t1 = t0 + dt;
    for (; n < samples; ++n) {
      const double t = static_cast<double>(n) / rate;
      if (t > t1) break;
      const double s = (t - t0) / dt;
      out[n] = v0 + (v1 - v0) * 0.5 * (1.0 - std::cos(kPi * s));
    }
    t0 = t1;
    v0 = v1;
  }
  return out;
}

std::vector<Vec3> central_velocity(const std::vector<Vec3>& p, double rate) {
  const std::size_t n = p.size();
  std::vector<Vec3> v(n);
  if (n < 2) return v;
  for (std::size_t i = 1; i + 1 < n; ++i) v[i] = (p[i + 1] - p[i - 1]) * (0.5 * rate);
  v[0] = (p[1] - p[0]) * rate;
  v[n - 1] = (p[n - 1] - p[n - 2]) * rate;
  return v;
}

// World-frame rotation vector taking `from` to `to`. Equal inputs give an
// exact zero; q * conj(q) alone leaves roundoff that would leak into a
// static gyro.
Vec3 world_rotvec(const Quat& to, const Quat& from) {
  if (to == from) return Vec3{};
  return quat_to_rotvec(hamilton(to, from.conj()));
}

// World-frame angular velocity of an orientation sequence.
std::vector<Vec3> world_angular_velocity(const std::vector<BodyPose>& poses, double rate) {
  const std::size_t n = poses.size();
  std::vector<Vec3> w(n);
  if (n < 2) return w;
  auto diff = [&](std::size_t a, std::size_t b, double scale) {
    return world_rotvec(poses[b].orientation, poses[a].orientation) * scale;
  };
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = diff(i - 1, i + 1, 0.5 * rate);
  w[0] = diff(0, 1, rate);
  w[n - 1] = diff(n - 2, n - 1, rate);
  return w;
}

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

bool is_leaf(const std::vector<std::vector<int>>& children, std::size_t i) {
  return children[i].empty();
}

}  // namespace

RandomizationRanges parse_ranges(std::istream& in) {
  RandomizationRanges r;
  const std::map<std::string, double*> keys = {
      {"segment_length_min", &r.segment_length_min},
      {"segment_length_max", &r.segment_length_max},
      {"imu_lateral_offset", &r.imu_lateral_offset},
      {"joint_angle_range", &r.joint_angle_range},
      {"joint_rate_max", &r.joint_rate_max},
      {"waypoint_interval_min", &r.waypoint_interval_min},
      {"waypoint_interval_max", &r.waypoint_interval_max},
      {"base_tilt_range", &r.base_tilt_range},
      {"base_yaw_range", &r.base_yaw_range},
      {"base_rate_max", &r.base_rate_max},
      {"base_translation_range", &r.base_translation_range},
      {"base_speed_max", &r.base_speed_max},
      {"stiffness_t_min", &r.stiffness_t_min},
      {"stiffness_t_max", &r.stiffness_t_max},
      {"stiffness_r_min", &r.stiffness_r_min},
      {"stiffness_r_max", &r.stiffness_r_max},
      {"damping_ratio_min", &r.damping_ratio_min},
      {"damping_ratio_max", &r.damping_ratio_max},
      {"gyro_noise_max", &r.gyro_noise_max},
      {"acc_noise_max", &r.acc_noise_max},
      {"gyro_bias_max", &r.gyro_bias_max},
      {"acc_bias_max", &r.acc_bias_max},
  };
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string{};
      const auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos)
      fail(ErrorCode::kInvalidArgument, "ranges config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end())
      fail(ErrorCode::kInvalidArgument, "ranges config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    std::istringstream vs(value);
    double v = 0.0;
    if (!(vs >> v) || !std::isfinite(v) || v < 0.0)
      fail(ErrorCode::kInvalidArgument, "ranges config line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    *it->second = v;
  }
  if (r.segment_length_min <= 0.0 || r.segment_length_max < r.segment_length_min ||
      r.waypoint_interval_min <= 0.0 || r.waypoint_interval_max < r.waypoint_interval_min ||
      r.stiffness_t_min <= 0.0 || r.stiffness_t_max < r.stiffness_t_min ||
      r.stiffness_r_min <= 0.0 || r.stiffness_r_max < r.stiffness_r_min ||
      r.damping_ratio_min <= 0.0 || r.damping_ratio_max < r.damping_ratio_min)
    fail(ErrorCode::kInvalidArgument, "ranges config: inconsistent min/max pair");
  return r;
}

RandomizationRanges load_ranges(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open ranges config '" + path + "'");
  return parse_ranges(in);
}

void validate_training_pair(const TrainingPair& p, double unit_tolerance) {
  if (p.lambda.size() != p.N) fail(ErrorCode::kInvariant, "training pair: parent array size != N");
  if (p.X.size() != p.T * p.N * kChannels || p.Y.size() != p.T * p.N)
    fail(ErrorCode::kInvariant, "training pair: tensor sizes do not match T x N");
  if (!(p.F > 0.0)) fail(ErrorCode::kInvariant, "training pair: sampling rate must be positive");
  const double inv_rate = 1.0 / p.F;
  for (std::size_t t = 0; t < p.T; ++t) {
    for (std::size_t i = 0; i < p.N; ++i) {
      for (std::size_t c = 0; c < kChannels; ++c)
        if (!std::isfinite(p.x(t, i, c)))
          fail(ErrorCode::kInvariant, "training pair: non-finite X at t=" + std::to_string(t));
      if (std::abs(p.x(t, i, kInverseRateChannel) - inv_rate) > 1e-6 * inv_rate)
        fail(ErrorCode::kInvariant, "training pair: channel 9 != 1/F at t=" + std::to_string(t));
      const double n = p.y(t, i).norm();
      if (!(std::abs(n - 1.0) <= unit_tolerance))
        fail(ErrorCode::kInvariant, "training pair: non-unit Y at t=" + std::to_string(t) +
                                        " body=" + std::to_string(i + 1));
    }
  }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combination of both inputs
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

ChainConfig sample_chain_config(std::uint64_t seed, const AblationFlags& flags,
                                const ParentArray& lambda, const RandomizationRanges& ranges) {
  validate_parent_array(lambda);
  Rng rng(seed);
  const std::size_t n = lambda.size();
  const auto children = children_of(lambda);
  ChainConfig c;
  c.n = n;
  c.segment_lengths.resize(n);
  c.joint_axes.resize(n);
  c.imu_attachment.resize(n);
  c.axis_known.assign(n, !flags.misaligned);
  c.imu_present.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.segment_lengths[i] = uniform(rng, ranges.segment_length_min, ranges.segment_length_max);
    const Vec3 axis = random_unit_vector(rng);
    c.joint_axes[i] = lambda.parents[i] == 0 ? Vec3{0.0, 0.0, 1.0} : axis;
    const Vec3 offset{uniform(rng, 0.0, c.segment_lengths[i]),
                      uniform(rng, -ranges.imu_lateral_offset, ranges.imu_lateral_offset),
                      uniform(rng, -ranges.imu_lateral_offset, ranges.imu_lateral_offset)};
    const double kt = log_uniform(rng, ranges.stiffness_t_min, ranges.stiffness_t_max);
    const double zt = log_uniform(rng, ranges.damping_ratio_min, ranges.damping_ratio_max);
    const double kr = log_uniform(rng, ranges.stiffness_r_min, ranges.stiffness_r_max);
    const double zr = log_uniform(rng, ranges.damping_ratio_min, ranges.damping_ratio_max);
    if (flags.nonrigid) {
      c.imu_attachment[i] =
          NonrigidAttachment{offset, kt, 2.0 * zt * std::sqrt(kt), kr, 2.0 * zr * std::sqrt(kr)};
    } else {
      c.imu_attachment[i] = RigidAttachment{offset};
    }
    c.imu_present[i] = !flags.sparse || lambda.parents[i] == 0 || is_leaf(children, i);
  }
  return c;
}

MotionSequence sample_motion(std::uint64_t seed, const ChainConfig& config,
                             const ParentArray& lambda, double duration,
                             const RandomizationRanges& r) {
  if (!(duration > 0.0)) fail(ErrorCode::kInvalidArgument, "sample_motion: duration must be positive");
  if (config.n != lambda.size()) fail(ErrorCode::kInvalidArgument, "sample_motion: config/parent size mismatch");
  Rng rng(seed);
  MotionSequence m;
  m.fine_rate = kFineRate;
  m.duration = duration;
  const auto samples = static_cast<std::size_t>(std::llround(duration * kFineRate)) + 1;
  auto traj = [&](double range, double rate_max) {
    return waypoint_trajectory(rng, samples, kFineRate, range, rate_max, r.waypoint_interval_min,
                               r.waypoint_interval_max);
  };
  const auto yaw = traj(r.base_yaw_range, r.base_rate_max);
  const auto pitch = traj(r.base_tilt_range, r.base_rate_max);
  const auto roll = traj(r.base_tilt_range, r.base_rate_max);
  const auto px = traj(r.base_translation_range, r.base_speed_max);
  const auto py = traj(r.base_translation_range, r.base_speed_max);
  const auto pz = traj(r.base_translation_range, r.base_speed_max);
  m.base_poses.resize(samples);
  const Vec3 ex{1, 0, 0}, ey{0, 1, 0}, ez{0, 0, 1};
  for (std::size_t k = 0; k < samples; ++k) {
    const Quat q = quat_mul(quat_from_axis_angle(ez, yaw[k]),
                            quat_mul(quat_from_axis_angle(ey, pitch[k]), quat_from_axis_angle(ex, roll[k])));
    m.base_poses[k] = {q, {px[k], py[k], pz[k]}};
  }
  m.joint_angles.resize(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    if (lambda.parents[i] == 0) {
      m.joint_angles[i].assign(samples, 0.0);
      continue;
    }
    m.joint_angles[i] = traj(r.joint_angle_range, r.joint_rate_max);
  }
  return m;
}

std::vector<std::vector<BodyPose>> body_trajectories(const ChainConfig& config,
                                                     const ParentArray& lambda,
                                                     const MotionSequence& motion) {
  const std::size_t n = config.n;
  std::vector<std::vector<BodyPose>> out(n, std::vector<BodyPose>(motion.samples()));
  std::vector<double> angles(n);
  for (std::size_t k = 0; k < motion.samples(); ++k) {
    for (std::size_t i = 0; i < n; ++i) angles[i] = motion.joint_angles[i][k];
    const auto poses = forward_kinematics(config, lambda, motion.base_poses[k], angles);
    for (std::size_t i = 0; i < n; ++i) out[i][k] = poses[i];
  }
  return out;
}

std::vector<BodyPose> simulate_nonrigid_imu(const std::vector<BodyPose>& body_poses,
                                            const NonrigidAttachment& a, double fine_rate) {
  if (!(a.stiffness_t > 0.0 && a.damping_t > 0.0 && a.stiffness_r > 0.0 && a.damping_r > 0.0))
    fail(ErrorCode::kInvalidArgument, "simulate_nonrigid_imu: stiffness and damping must be positive");
  const std::size_t n = body_poses.size();
  std::vector<BodyPose> nominal(n);
  std::vector<Vec3> p_nom(n);
  for (std::size_t k = 0; k < n; ++k) {
    nominal[k] = rigid_imu_pose(body_poses[k], a.offset);
    p_nom[k] = nominal[k].position;
  }
  if (n == 0) return nominal;
  const auto v_nom = central_velocity(p_nom, fine_rate);
  const auto w_nom = world_angular_velocity(nominal, fine_rate);
  const double dt = 1.0 / fine_rate;

  std::vector<BodyPose> out(n);
  out[0] = nominal[0];
  Vec3 p = nominal[0].position, v = v_nom[0], w = w_nom[0];
  Quat q = nominal[0].orientation;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const Vec3 acc = (p - p_nom[k]) * -a.stiffness_t - (v - v_nom[k]) * a.damping_t;
    v += acc * dt;
    p += v * dt;
    const Vec3 err = world_rotvec(q, nominal[k].orientation);
    const Vec3 torque = err * -a.stiffness_r - (w - w_nom[k]) * a.damping_r;
    w += torque * dt;
    if (!(w == Vec3{})) q = quat_mul(quat_from_rotvec(w * dt), q);  // renormalizing would perturb q
    if (!finite(p) || !finite(v) || !finite(w) || !std::isfinite(q.w))
      fail(ErrorCode::kUnstable, "simulate_nonrigid_imu: state became non-finite at sample " +
                                     std::to_string(k + 1));
    out[k + 1] = {q, p};
  }
  return out;
}

ImuSignals synthesize_imu(const std::vector<BodyPose>& imu_poses, double fine_rate, double F,
                          const ImuModel& model, std::uint64_t seed) {
  if (!(F > 0.0) || F > fine_rate)
    fail(ErrorCode::kInvalidArgument, "synthesize_imu: sampling rate must be in (0, fine_rate]");
  const std::size_t n = imu_poses.size();
  if (n < 3) fail(ErrorCode::kInvalidArgument, "synthesize_imu: need at least three fine samples");
  const double dt = 1.0 / fine_rate;

  std::vector<Vec3> gyro(n), acc(n);
  auto local_rate = [&](std::size_t a, std::size_t b, double scale) {
    // Exactly zero for a sensor at rest, not merely round-off small.
    if (imu_poses[a].orientation == imu_poses[b].orientation) return Vec3{};
    return quat_to_rotvec(hamilton(imu_poses[a].orientation.conj(), imu_poses[b].orientation)) * scale;
  };
  for (std::size_t k = 1; k + 1 < n; ++k) gyro[k] = local_rate(k - 1, k + 1, 0.5 * fine_rate);
  gyro[0] = local_rate(0, 1, fine_rate);
  gyro[n - 1] = local_rate(n - 2, n - 1, fine_rate);

  std::vector<Vec3> a_world(n);
  for (std::size_t k = 1; k + 1 < n; ++k)
    a_world[k] = (imu_poses[k + 1].position - imu_poses[k].position * 2.0 + imu_poses[k - 1].position) /
                 (dt * dt);
  a_world[0] = a_world[1];
  a_world[n - 1] = a_world[n - 2];
  for (std::size_t k = 0; k < n; ++k)
    acc[k] = quat_rotate(imu_poses[k].orientation.conj(), a_world[k] + model.gravity);

  const double duration = static_cast<double>(n - 1) / fine_rate;
  const auto T = static_cast<std::size_t>(std::llround(duration * F));
  const Resampler resampler(fine_rate, n, F, T);
  ImuSignals out{resampler.apply(std::span<const Vec3>(gyro)), resampler.apply(std::span<const Vec3>(acc))};

  Rng rng(seed);
  auto bias = [&](double range) {
    return Vec3{uniform(rng, -range, range), uniform(rng, -range, range), uniform(rng, -range, range)};
  };
  const Vec3 bg = model.bias_range_gyro > 0.0 ? bias(model.bias_range_gyro) : Vec3{};
  const Vec3 ba = model.bias_range_acc > 0.0 ? bias(model.bias_range_acc) : Vec3{};
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t t = 0; t < T; ++t) {
    out.gyro[t] += bg;
    out.acc[t] += ba;
    if (model.noise_std_gyro > 0.0)
      out.gyro[t] += Vec3{gauss(rng), gauss(rng), gauss(rng)} * model.noise_std_gyro;
    if (model.noise_std_acc > 0.0)
      out.acc[t] += Vec3{gauss(rng), gauss(rng), gauss(rng)} * model.noise_std_acc;
  }
  return out;
}

TrainingPair assemble_training_pair(const ChainConfig& config, const ParentArray& lambda,
                                    const MotionSequence& motion,
                                    const std::vector<ImuSignals>& imu, double F) {
  const std::size_t n = config.n;
  if (lambda.size() != n || imu.size() != n || motion.joint_angles.size() != n)
    fail(ErrorCode::kInvalidArgument, "assemble_training_pair: layout mismatch in body count");
  const auto T = static_cast<std::size_t>(std::llround(motion.duration * F));
  TrainingPair p;
  p.T = T;
  p.N = n;
  p.F = F;
  p.lambda = lambda;
  p.X.assign(T * n * kChannels, 0.0);
  p.Y.assign(T * n, Quat::identity());

  for (std::size_t i = 0; i < n; ++i) {
    if (config.imu_present[i]) {
      if (imu[i].gyro.size() != T || imu[i].acc.size() != T)
        fail(ErrorCode::kInvalidArgument, "assemble_training_pair: layout mismatch in IMU signal length for body " +
                                              std::to_string(i + 1));
    }
  }

  std::vector<double> angles(n);
  const double ratio = motion.fine_rate / F;
  for (std::size_t t = 0; t < T; ++t) {
    const double idx = static_cast<double>(t) * ratio;
    const auto k0 = std::min(static_cast<std::size_t>(idx), motion.samples() - 1);
    const std::size_t k1 = std::min(k0 + 1, motion.samples() - 1);
    const double u = std::clamp(idx - static_cast<double>(k0), 0.0, 1.0);
    BodyPose base;
    base.orientation = slerp(motion.base_poses[k0].orientation, motion.base_poses[k1].orientation, u);
    base.position = motion.base_poses[k0].position * (1.0 - u) + motion.base_poses[k1].position * u;
    for (std::size_t i = 0; i < n; ++i)
      angles[i] = interp_linear(motion.joint_angles[i], idx);
    const auto poses = forward_kinematics(config, lambda, base, angles);
    for (std::size_t i = 0; i < n; ++i) {
      const int body = static_cast<int>(i + 1);
      p.y(t, i) = relative_orientation(poses, lambda, body);
      if (config.imu_present[i]) {
        const Vec3& g = imu[i].gyro[t];
        const Vec3& a = imu[i].acc[t];
        p.x(t, i, 0) = g.x; p.x(t, i, 1) = g.y; p.x(t, i, 2) = g.z;
        p.x(t, i, 3) = a.x; p.x(t, i, 4) = a.y; p.x(t, i, 5) = a.z;
      }
      if (config.axis_known[i] && lambda.parents[i] != 0) {
        const Vec3& ax = config.joint_axes[i];
        p.x(t, i, 6) = ax.x; p.x(t, i, 7) = ax.y; p.x(t, i, 8) = ax.z;
      }
      p.x(t, i, kInverseRateChannel) = 1.0 / F;
    }
  }
  return p;
}

GeneratedSequence generate_sequence(std::uint64_t seed, double F, const GeneratorOptions& o) {
  if (o.timesteps == 0) fail(ErrorCode::kInvalidArgument, "generate: timesteps must be positive");
  if (!(F > 0.0) || F > kFineRate) fail(ErrorCode::kInvalidArgument, "generate: sampling rate out of range");
  GeneratedSequence g;
  g.config = sample_chain_config(derive_seed(seed, 0), o.flags, o.lambda, o.ranges);
  const double duration = static_cast<double>(o.timesteps) / F;
  g.motion = sample_motion(derive_seed(seed, 1), g.config, o.lambda, duration, o.ranges);
  const auto bodies = body_trajectories(g.config, o.lambda, g.motion);

  Rng model_rng(derive_seed(seed, 2));
  const std::size_t n = g.config.n;
  g.imu_poses.resize(n);
  std::vector<ImuSignals> signals(n);
  for (std::size_t i = 0; i < n; ++i) {
    ImuModel model;
    if (o.imu_noise) {
      model.noise_std_gyro = uniform(model_rng, 0.0, o.ranges.gyro_noise_max);
      model.noise_std_acc = uniform(model_rng, 0.0, o.ranges.acc_noise_max);
      model.bias_range_gyro = o.ranges.gyro_bias_max;
      model.bias_range_acc = o.ranges.acc_bias_max;
    }
    if (!g.config.imu_present[i]) continue;
    const auto& att = g.config.imu_attachment[i];
    if (const auto* nr = std::get_if<NonrigidAttachment>(&att)) {
      g.imu_poses[i] = simulate_nonrigid_imu(bodies[i], *nr, kFineRate);
    } else {
      const Vec3 offset = std::holds_alternative<RigidAttachment>(att) ? std::get<RigidAttachment>(att).offset : Vec3{};
      g.imu_poses[i].resize(bodies[i].size());
      for (std::size_t k = 0; k < bodies[i].size(); ++k) g.imu_poses[i][k] = rigid_imu_pose(bodies[i][k], offset);
    }
    signals[i] = synthesize_imu(g.imu_poses[i], kFineRate, F, model, derive_seed(seed, 10 + i));
  }
  g.pair = assemble_training_pair(g.config, o.lambda, g.motion, signals, F);
  return g;
}

std::vector<TrainingPair> generate_batch(std::uint64_t seed, std::size_t count,
                                         const GeneratorOptions& options) {
  if (count == 0) fail(ErrorCode::kInvalidArgument, "generate_batch: count must be >= 1");
  if (options.rate_set.empty()) fail(ErrorCode::kInvalidArgument, "generate_batch: empty rate set");
  std::vector<TrainingPair> out(count);
  detail::parallel_for(count, options.threads, [&](std::size_t k) {
    const std::uint64_t s = derive_seed(seed, k);
    Rng pick(derive_seed(s, 99));
    const double F = options.rate_set[std::uniform_int_distribution<std::size_t>(0, options.rate_set.size() - 1)(pick)];
    out[k] = generate_sequence(s, F, options).pair;
  });
  return out;
}

}  // namespace ring
