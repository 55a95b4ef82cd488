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

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "ring/error.hpp"
#include "ring/rcmg.hpp"

using namespace ring;

namespace {

std::vector<BodyPose> constant_poses(std::size_t n, const BodyPose& p) { return std::vector<BodyPose>(n, p); }

double mean_deviation_deg(const std::vector<BodyPose>& a, const std::vector<BodyPose>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += quat_angle_deg(a[k].orientation, b[k].orientation);
  return s / static_cast<double>(a.size());
}

// Body spinning about world z at `rate` while translating on a circle.
std::vector<BodyPose> wobbling_body(double duration, double fine_rate) {
  const auto n = static_cast<std::size_t>(std::llround(duration * fine_rate)) + 1;
  std::vector<BodyPose> poses(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) / fine_rate;
    const Quat q = quat_mul(quat_from_axis_angle({0, 0, 1}, 1.5 * std::sin(3.0 * t)),
                            quat_from_axis_angle({1, 0, 0}, 0.8 * std::sin(5.0 * t)));
    poses[k] = {q, {0.2 * std::sin(4.0 * t), 0.1 * std::cos(2.0 * t), 0.0}};
  }
  return poses;
}

GeneratorOptions noise_free(std::size_t T, std::vector<double> rates) {
  GeneratorOptions o;
  o.timesteps = T;
  o.rate_set = std::move(rates);
  o.imu_noise = false;
  return o;
}

}  // namespace

TEST_CASE("derive_seed separates streams") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("sample_chain_config") {
  const auto lambda = ParentArray::chain(3);
  const auto a = sample_chain_config(42, {}, lambda);
  const auto b = sample_chain_config(42, {}, lambda);
  CHECK(a.segment_lengths == b.segment_lengths);
  CHECK(a.joint_axes == b.joint_axes);
  CHECK_NOTHROW(validate_chain_config(a));
  for (double L : a.segment_lengths) {
    CHECK(L >= 0.1);
    CHECK(L <= 0.5);
  }
  CHECK(a.imu_present == std::vector<bool>{true, true, true});
  CHECK(a.axis_known == std::vector<bool>{true, true, true});
  for (const auto& att : a.imu_attachment) CHECK(std::holds_alternative<RigidAttachment>(att));

  const auto sparse = sample_chain_config(42, {false, false, true}, lambda);
  CHECK(sparse.imu_present == std::vector<bool>{true, false, true});
  const auto mis = sample_chain_config(42, {false, true, false}, lambda);
  CHECK(mis.axis_known == std::vector<bool>{false, false, false});
  const auto nr = sample_chain_config(42, {true, false, false}, lambda);
  for (const auto& att : nr.imu_attachment) CHECK(std::holds_alternative<NonrigidAttachment>(att));

  // Sparse on a tree keeps IMUs on the root and every leaf.
  const auto tree = sample_chain_config(3, {false, false, true}, ParentArray{{0, 1, 2, 2, 1}});
  CHECK(tree.imu_present == std::vector<bool>{true, false, true, true, true});
}

TEST_CASE("sample_motion length, determinism and reference start") {
  const auto lambda = ParentArray::chain(3);
  const auto config = sample_chain_config(5, {}, lambda);
  const auto m = sample_motion(6, config, lambda, 60.0);
  CHECK(m.samples() == 60001);
  CHECK(m.joint_angles.size() == 3);
  for (const auto& a : m.joint_angles) CHECK(a.size() == 60001);
  const auto again = sample_motion(6, config, lambda, 60.0);
  bool same = true;
  for (std::size_t k = 0; k < m.samples(); ++k) {
    same = same && m.base_poses[k].orientation == again.base_poses[k].orientation &&
           m.base_poses[k].position == again.base_poses[k].position;
    for (std::size_t i = 0; i < 3; ++i) same = same && m.joint_angles[i][k] == again.joint_angles[i][k];
  }
  CHECK(same);
  CHECK(m.base_poses[0].orientation == Quat::identity());
  CHECK(m.base_poses[0].position == Vec3{});
  for (const auto& a : m.joint_angles) CHECK(a[0] == 0.0);

  // Joint rates stay within the configured limit.
  const RandomizationRanges r;
  double max_rate = 0.0;
  for (std::size_t i = 1; i < 3; ++i)
    for (std::size_t k = 1; k < m.samples(); ++k)
      max_rate = std::max(max_rate, std::abs(m.joint_angles[i][k] - m.joint_angles[i][k - 1]) * kFineRate);
  CHECK(max_rate <= r.joint_rate_max * 1.001);
  CHECK(max_rate > 0.1);
}

TEST_CASE("nonrigid IMU at equilibrium equals the rigid pose") {
  const BodyPose body{oracle::q_axis_deg({1, 1, 0}, 30), {0.1, 0.2, 0.3}};
  const NonrigidAttachment att{{0.1, 0.01, -0.02}, 400.0, 10.0, 400.0, 10.0};
  const auto out = simulate_nonrigid_imu(constant_poses(2000, body), att, kFineRate);
  const BodyPose rigid = rigid_imu_pose(body, att.offset);
  for (const auto& p : out) {
    CHECK(p.orientation == rigid.orientation);
    CHECK(p.position == rigid.position);
  }
  // Holds bit for bit for arbitrary mounts, so a static gyro reads exactly 0.
  oracle::Random rnd(123);
  for (int trial = 0; trial < 50; ++trial) {
    const BodyPose b{rnd.quat(), rnd.vec()};
    const auto o = simulate_nonrigid_imu(constant_poses(300, b), att, kFineRate);
    const auto s = synthesize_imu(o, kFineRate, 100.0, {}, 1);
    bool exact = true;
    for (const auto& g : s.gyro) exact = exact && g == Vec3{};
    CHECK(exact);
  }
}

TEST_CASE("nonrigid deviation shrinks with stiffness") {
  const auto body = wobbling_body(5.0, kFineRate);
  const Vec3 offset{0.1, 0.0, 0.02};
  std::vector<BodyPose> rigid(body.size());
  for (std::size_t k = 0; k < body.size(); ++k) rigid[k] = rigid_imu_pose(body[k], offset);
  double prev = 1e9;
  for (double k : {100.0, 1000.0, 10000.0, 100000.0}) {
    const double d = 2.0 * 0.5 * std::sqrt(k);
    const auto out = simulate_nonrigid_imu(body, {offset, k, d, k, d}, kFineRate);
    const double dev = mean_deviation_deg(out, rigid);
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("nonrigid IMU settles back after a disturbance") {
  // The body jumps once; a damped spring pulls the IMU back to the new pose.
  std::vector<BodyPose> body(4000, BodyPose{});
  for (std::size_t k = 1000; k < body.size(); ++k) body[k].orientation = oracle::q_axis_deg({0, 1, 0}, 20);
  const auto out = simulate_nonrigid_imu(body, {{}, 900.0, 60.0, 900.0, 60.0}, kFineRate);
  CHECK(quat_angle_deg(out[1010].orientation, body[1010].orientation) > 1.0);
  CHECK(quat_angle_deg(out.back().orientation, body.back().orientation) < 1e-3);
}

TEST_CASE("nonrigid simulation reports instability") {
  const auto body = wobbling_body(1.0, kFineRate);
  CHECK_THROWS_AS(simulate_nonrigid_imu(body, {{}, 1e9, 1.0, 1e9, 1.0}, kFineRate), Error);
  try {
    simulate_nonrigid_imu(body, {{}, 1e9, 1.0, 1e9, 1.0}, kFineRate);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnstable);
  }
  CHECK_THROWS_AS(simulate_nonrigid_imu(body, {{}, -1.0, 1.0, 1.0, 1.0}, kFineRate), Error);
}

TEST_CASE("synthesize_imu static fixture") {
  for (const Quat& q : {Quat::identity(), oracle::q_axis_deg({1, -2, 0.5}, 73)}) {
    const auto poses = constant_poses(5001, {q, {0.3, 0.0, 1.0}});
    const auto s = synthesize_imu(poses, kFineRate, 100.0, {}, 1);
    REQUIRE(s.gyro.size() == 500);
    for (std::size_t t = 0; t < s.gyro.size(); ++t) {
      CHECK(s.gyro[t] == Vec3{});
      CHECK(norm(s.acc[t]) == doctest::Approx(kGravity).epsilon(1e-10));
      // The sensor sees gravity in its own frame.
      const Vec3 expected = oracle::apply(oracle::transpose(oracle::from_quat(q)), {0, 0, kGravity});
      CHECK(norm(s.acc[t] - expected) < 1e-9);
    }
  }
}

TEST_CASE("synthesize_imu constant spin") {
  std::vector<BodyPose> poses(3001);
  for (std::size_t k = 0; k < poses.size(); ++k)
    poses[k].orientation = quat_from_axis_angle({0, 0, 1}, static_cast<double>(k) / kFineRate);
  const auto s = synthesize_imu(poses, kFineRate, 100.0, {}, 1);
  for (const auto& g : s.gyro) CHECK(norm(g - Vec3{0, 0, 1}) < 1e-9);
  for (const auto& a : s.acc) CHECK(norm(a - Vec3{0, 0, kGravity}) < 1e-9);
}

TEST_CASE("synthesize_imu noise and bias are deterministic in seed") {
  const auto poses = constant_poses(2001, {});
  ImuModel m;
  m.noise_std_gyro = 0.01;
  m.noise_std_acc = 0.1;
  m.bias_range_gyro = 0.02;
  m.bias_range_acc = 0.2;
  const auto a = synthesize_imu(poses, kFineRate, 50.0, m, 9);
  const auto b = synthesize_imu(poses, kFineRate, 50.0, m, 9);
  const auto c = synthesize_imu(poses, kFineRate, 50.0, m, 10);
  CHECK(a.gyro == b.gyro);
  CHECK(a.acc == b.acc);
  CHECK(a.gyro != c.gyro);
  // Mean gyro equals the bias, which lies in range.
  Vec3 mean;
  for (const auto& g : a.gyro) mean += g;
  mean = mean / static_cast<double>(a.gyro.size());
  for (int k = 0; k < 3; ++k) CHECK(std::abs(mean[k]) < 0.02 + 0.005);
}

TEST_CASE("synthesize_imu rejects rates above the fine rate") {
  const auto poses = constant_poses(100, {});
  CHECK_THROWS_AS(synthesize_imu(poses, kFineRate, 2000.0, {}, 1), Error);
  CHECK_THROWS_AS(synthesize_imu(constant_poses(2, {}), kFineRate, 100.0, {}, 1), Error);
}

TEST_CASE("assembled pairs: layout, rate channel and dropout") {
  GeneratorOptions o = noise_free(200, {100});
  const auto g = generate_sequence(11, 100.0, o);
  const TrainingPair& p = g.pair;
  CHECK(p.T == 200);
  CHECK(p.N == 3);
  CHECK(p.F == 100.0);
  CHECK_NOTHROW(validate_training_pair(p));
  for (std::size_t t = 0; t < p.T; ++t)
    for (std::size_t i = 0; i < p.N; ++i) CHECK(p.x(t, i, kInverseRateChannel) == 0.01);
  // Joint axis channels carry the hinge axis of non-root bodies and zeros for the root.
  for (std::size_t t = 0; t < p.T; ++t) {
    for (std::size_t c = 6; c < 9; ++c) CHECK(p.x(t, 0, c) == 0.0);
    CHECK(p.x(t, 1, 6) == g.config.joint_axes[1].x);
    CHECK(p.x(t, 2, 8) == g.config.joint_axes[2].z);
  }

  o.flags.sparse = true;
  const auto s = generate_sequence(11, 100.0, o).pair;
  for (std::size_t t = 0; t < s.T; ++t)
    for (std::size_t c = 0; c < 6; ++c) CHECK(s.x(t, 1, c) == 0.0);

  o.flags = {false, true, false};
  const auto m = generate_sequence(11, 100.0, o).pair;
  for (std::size_t t = 0; t < m.T; ++t)
    for (std::size_t i = 0; i < m.N; ++i)
      for (std::size_t c = 6; c < 9; ++c) CHECK(m.x(t, i, c) == 0.0);
}

TEST_CASE("targets are unit quaternions about the hinge axes") {
  const GeneratorOptions o = noise_free(1000, {100});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto g = generate_sequence(seed, 100.0, o);
    const TrainingPair& p = g.pair;
    for (std::size_t t = 0; t < p.T; ++t) {
      for (std::size_t i = 0; i < p.N; ++i) {
        const Quat y = p.y(t, i);
        CHECK(std::abs(y.norm() - 1.0) < 1e-9);
        if (p.lambda.parents[i] == 0) continue;
        const AxisAngle aa = quat_to_axis_angle(y);
        if (aa.angle < 1e-3) continue;
        const double misalign = std::asin(std::min(1.0, norm(cross(aa.axis, g.config.joint_axes[i]))));
        CHECK(misalign < 1e-6);
      }
    }
  }
}

TEST_CASE("accelerometer double-integrates to the IMU trajectory") {
  // Rotate the synthesized specific force into the world frame with the true
  // orientation, remove gravity and integrate twice (Stormer-Verlet) over 5 s
  // windows seeded with the true positions at the window start.
  const double F = 100.0;
  const GeneratorOptions o = noise_free(3000, {F});
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto g = generate_sequence(seed, F, o);
    const auto stride = static_cast<std::size_t>(kFineRate / F);
    for (std::size_t i = 0; i < g.pair.N; ++i) {
      const auto& poses = g.imu_poses[i];
      auto pos = [&](std::size_t t) { return poses[t * stride].position; };
      const std::size_t window = static_cast<std::size_t>(5.0 * F);
      for (std::size_t start = 1; start + window + 1 < g.pair.T; start += window) {
        Vec3 prev = pos(start - 1), p = pos(start);
        double err2 = 0.0, ref2 = 0.0;
        for (std::size_t t = start; t < start + window; ++t) {
          const Vec3 f{g.pair.x(t, i, 3), g.pair.x(t, i, 4), g.pair.x(t, i, 5)};
          const Vec3 a = oracle::apply(oracle::from_quat(poses[t * stride].orientation), f) - Vec3{0, 0, kGravity};
          const Vec3 next = p * 2.0 - prev + a / (F * F);
          prev = p;
          p = next;
          const Vec3 e = p - pos(t + 1);
          const Vec3 r = pos(t + 1) - pos(start);
          err2 += dot(e, e);
          ref2 += dot(r, r);
        }
        CHECK(std::sqrt(err2) <= 0.05 * std::sqrt(ref2));
      }
    }
  }
}

TEST_CASE("generate_batch") {
  GeneratorOptions o = noise_free(500, {40, 60, 80, 100, 120, 140, 160, 180, 200});
  const auto batch = generate_batch(3, 12, o);
  CHECK(batch.size() == 12);
  for (const auto& p : batch) {
    CHECK(p.T == 500);
    CHECK(std::find(o.rate_set.begin(), o.rate_set.end(), p.F) != o.rate_set.end());
  }
  o.threads = 3;
  const auto threaded = generate_batch(3, 12, o);
  for (std::size_t k = 0; k < batch.size(); ++k) {
    CHECK(threaded[k].X == batch[k].X);
    CHECK(threaded[k].Y == batch[k].Y);
  }
  // T = 6000 at 100 Hz spans 60 s of motion.
  const auto g = generate_sequence(1, 100.0, noise_free(6000, {100}));
  CHECK(g.motion.duration == doctest::Approx(60.0));
  CHECK(g.pair.T == 6000);
  CHECK_THROWS_AS(generate_batch(1, 0, o), Error);
}

TEST_CASE("parse_ranges") {
  std::istringstream in("# desk scale\nsegment_length_min = 0.2\n  joint_rate_max=5 # slower\n\n");
  const auto r = parse_ranges(in);
  CHECK(r.segment_length_min == 0.2);
  CHECK(r.joint_rate_max == 5.0);
  CHECK(r.segment_length_max == RandomizationRanges{}.segment_length_max);
  std::istringstream bad_key("no_such_key = 1\n");
  CHECK_THROWS_AS(parse_ranges(bad_key), Error);
  std::istringstream bad_value("joint_rate_max = fast\n");
  CHECK_THROWS_AS(parse_ranges(bad_value), Error);
  std::istringstream negative("joint_rate_max = -1\n");
  CHECK_THROWS_AS(parse_ranges(negative), Error);
}

TEST_CASE("validate_training_pair catches broken layouts") {
  auto p = generate_sequence(4, 100.0, noise_free(100, {100})).pair;
  auto bad = p;
  bad.X.pop_back();
  CHECK_THROWS_AS(validate_training_pair(bad), Error);
  bad = p;
  bad.y(3, 1) = Quat{1.1, 0, 0, 0};
  CHECK_THROWS_AS(validate_training_pair(bad), Error);
  bad = p;
  bad.x(5, 0, kInverseRateChannel) = 0.02;
  CHECK_THROWS_AS(validate_training_pair(bad), Error);
}
