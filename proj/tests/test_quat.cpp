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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "ring/error.hpp"
#include "ring/quat.hpp"

using namespace ring;
using oracle::q_axis_deg;

namespace {

bool near(const Quat& a, const Quat& b, double tol) {
  return std::abs(a.w - b.w) <= tol && std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(a.z - b.z) <= tol;
}

bool near_rotation(const Quat& a, const Quat& b, double tol) { return near(a, b, tol) || near(a, -b, tol); }

bool near(const Vec3& a, const Vec3& b, double tol) { return norm(a - b) <= tol; }

}  // namespace

TEST_CASE("quat_mul basic cases") {
  oracle::Random rnd(1);
  const Quat q = rnd.quat();
  CHECK(near(quat_mul(Quat::identity(), q), q, 1e-15));
  const Quat qx = q_axis_deg({1, 0, 0}, 90);
  CHECK(near_rotation(quat_mul(qx, qx), {0, 1, 0, 0}, 1e-12));
  for (int k = 0; k < 100; ++k) {
    const Quat r = rnd.quat();
    CHECK(near_rotation(quat_mul(r, r.conj()), Quat::identity(), 1e-9));
  }
}

TEST_CASE("quat_mul agrees with the rotation-matrix product") {
  oracle::Random rnd(2);
  for (int k = 0; k < 1000; ++k) {
    const Quat a = rnd.quat(), b = rnd.quat();
    const auto expected = oracle::mul(oracle::from_quat(a), oracle::from_quat(b));
    CHECK(oracle::max_abs_diff(oracle::from_quat(quat_mul(a, b)), expected) < 1e-12);
  }
}

TEST_CASE("quat_mul is associative and composes rotations") {
  oracle::Random rnd(3);
  for (int k = 0; k < 1000; ++k) {
    const Quat a = rnd.quat(), b = rnd.quat(), c = rnd.quat();
    CHECK(near_rotation(quat_mul(quat_mul(a, b), c), quat_mul(a, quat_mul(b, c)), 1e-9));
    const Vec3 v = rnd.vec(3.0);
    CHECK(near(quat_rotate(quat_mul(a, b), v), quat_rotate(a, quat_rotate(b, v)), 1e-9));
  }
}

TEST_CASE("quat_rotate") {
  CHECK(near(quat_rotate(q_axis_deg({0, 0, 1}, 90), {1, 0, 0}), {0, 1, 0}, 1e-15));
  const Vec3 v{0.3, -2.0, 5.0};
  CHECK(quat_rotate(Quat::identity(), v) == v);
  oracle::Random rnd(4);
  for (int k = 0; k < 200; ++k) {
    const Quat q = rnd.quat();
    const Vec3 u = rnd.vec();
    CHECK(near(quat_rotate(q, u), oracle::apply(oracle::from_quat(q), u), 1e-12));
  }
}

TEST_CASE("quat_from_axis_angle") {
  CHECK(quat_from_axis_angle({0, 0, 1}, 0.0) == Quat::identity());
  CHECK(near(quat_from_axis_angle({1, 0, 0}, kPi), {0, 1, 0, 0}, 1e-15));
  // Unnormalized axes are accepted.
  CHECK(near(quat_from_axis_angle({0, 0, 5}, kPi / 2), q_axis_deg({0, 0, 1}, 90), 1e-15));
  CHECK_THROWS_AS(quat_from_axis_angle({0, 0, 0}, 1.0), Error);
  oracle::Random rnd(5);
  for (int k = 0; k < 200; ++k) {
    const Vec3 axis = rnd.unit();
    const double angle = rnd.uniform(-4.0, 4.0);
    CHECK(oracle::max_abs_diff(oracle::from_quat(quat_from_axis_angle(axis, angle)),
                               oracle::axis_angle(axis, angle)) < 1e-12);
  }
}

TEST_CASE("axis-angle and rotation-vector roundtrips") {
  oracle::Random rnd(6);
  for (int k = 0; k < 500; ++k) {
    const Quat q = rnd.quat();
    const AxisAngle aa = quat_to_axis_angle(q);
    CHECK(aa.angle >= 0.0);
    CHECK(aa.angle <= kPi + 1e-12);
    CHECK(near_rotation(quat_from_axis_angle(aa.axis, aa.angle), q, 1e-9));
    CHECK(near_rotation(quat_from_rotvec(quat_to_rotvec(q)), q, 1e-9));
  }
  CHECK(quat_to_rotvec(Quat::identity()) == Vec3{});
}

TEST_CASE("quat_angle_deg") {
  oracle::Random rnd(7);
  const Quat q = rnd.quat();
  CHECK(quat_angle_deg(q, q) == 0.0);
  CHECK(quat_angle_deg(q, -q) == 0.0);
  CHECK(quat_angle_deg(Quat::identity(), q_axis_deg({1, 0, 0}, 10)) == doctest::Approx(10.0).epsilon(1e-12));
  for (int k = 0; k < 500; ++k) {
    const Quat a = rnd.quat(), b = rnd.quat();
    CHECK(quat_angle_deg(a, b) == quat_angle_deg(b, a));
    const double expected = oracle::angle_between(oracle::from_quat(a), oracle::from_quat(b)) * kDegPerRad;
    CHECK(quat_angle_deg(a, b) == doctest::Approx(expected).epsilon(1e-9));
  }
  // Small angles keep precision where acos would not.
  CHECK(quat_angle_rad(Quat::identity(), quat_from_axis_angle({0, 1, 0}, 1e-6)) ==
        doctest::Approx(1e-6).epsilon(1e-9));
}

TEST_CASE("quat_integrate single steps") {
  CHECK(near(quat_integrate(Quat::identity(), {0, 0, kPi / 2}, 1.0), q_axis_deg({0, 0, 1}, 90), 1e-15));
  oracle::Random rnd(8);
  const Quat q = rnd.quat();
  CHECK(quat_integrate(q, {0, 0, 0}, 0.01) == q);
  // Body-frame rate: the increment is applied on the right.
  const Quat base = q_axis_deg({0, 0, 1}, 90);
  const Quat stepped = quat_integrate(base, {0.5, 0, 0}, 1.0);
  CHECK(near_rotation(stepped, quat_mul(base, quat_from_axis_angle({1, 0, 0}, 0.5)), 1e-15));
}

namespace {

// Fixed axis, rate A sin(2 pi f t): closed-form angle A (1 - cos(2 pi f t)) / (2 pi f).
double fixed_axis_error(double dt) {
  const double A = 2.0, f = 0.7, duration = 3.0;
  const Vec3 axis = Vec3{1, 2, -1} / std::sqrt(6.0);
  Quat q;
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int k = 0; k < n; ++k) q = quat_integrate(q, axis * (A * std::sin(2 * kPi * f * k * dt)), dt);
  const double angle = A * (1.0 - std::cos(2 * kPi * f * duration)) / (2 * kPi * f);
  return oracle::angle_between(oracle::from_quat(q), oracle::axis_angle(axis, angle));
}

// R(t) = Rz(a t) Rx(b t); body rate = Rx(b t)^T (0, 0, a) + (b, 0, 0).
double coning_error(double dt) {
  const double a = 1.3, b = 2.1, duration = 2.0;
  Quat q;
  const int n = static_cast<int>(std::lround(duration / dt));
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * dt;
    const Vec3 w = oracle::apply(oracle::transpose(oracle::axis_angle({1, 0, 0}, b * t)), {0, 0, a}) + Vec3{b, 0, 0};
    q = quat_integrate(q, w, dt);
  }
  const auto R = oracle::mul(oracle::axis_angle({0, 0, 1}, a * duration), oracle::axis_angle({1, 0, 0}, b * duration));
  return oracle::angle_between(oracle::from_quat(q), R);
}

}  // namespace

TEST_CASE("quat_integrate converges as dt shrinks") {
  double prev_fixed = 1e9, prev_coning = 1e9;
  for (double dt : {0.02, 0.01, 0.005, 0.0025, 0.00125}) {
    const double ef = fixed_axis_error(dt), ec = coning_error(dt);
    CHECK(ef < prev_fixed);
    CHECK(ec < prev_coning);
    prev_fixed = ef;
    prev_coning = ec;
  }
  CHECK(prev_fixed < 1e-2);
  CHECK(prev_coning < 1e-4);
}

TEST_CASE("heading_decompose") {
  const Vec3 up{0, 0, 1};
  const Quat z37 = q_axis_deg(up, 37);
  auto s = heading_decompose(z37, up);
  CHECK(near_rotation(s.heading, z37, 1e-12));
  CHECK(near_rotation(s.inclination, Quat::identity(), 1e-12));

  const Quat x20 = q_axis_deg({1, 0, 0}, 20);
  s = heading_decompose(x20, up);
  CHECK(near_rotation(s.heading, Quat::identity(), 1e-12));
  CHECK(near_rotation(s.inclination, x20, 1e-12));

  oracle::Random rnd(9);
  for (int k = 0; k < 1000; ++k) {
    const Quat q = rnd.quat();
    s = heading_decompose(q, up);
    CHECK(near_rotation(hamilton(s.heading, s.inclination), q, 1e-9));
    // Heading is a pure rotation about up.
    CHECK(std::abs(s.heading.x) < 1e-9);
    CHECK(std::abs(s.heading.y) < 1e-9);
    // Inclination has no twist about up: it maps up onto a vector in the
    // plane spanned by up and the swing axis, with zero z component of its
    // rotation vector.
    CHECK(std::abs(s.inclination.z) < 1e-9);
  }
}

TEST_CASE("heading_decompose with a tilted up axis") {
  oracle::Random rnd(10);
  for (int k = 0; k < 200; ++k) {
    const Vec3 up = rnd.unit();
    const Quat q = rnd.quat();
    const auto s = heading_decompose(q, up);
    CHECK(near_rotation(hamilton(s.heading, s.inclination), q, 1e-9));
    const Vec3 axis = s.heading.vec();
    CHECK(norm(cross(axis, up)) < 1e-9);
  }
}

TEST_CASE("heading_decompose degenerate case") {
  // 180 degree tilt: heading is identity by convention.
  const Quat flip{0, 1, 0, 0};
  const auto s = heading_decompose(flip, {0, 0, 1});
  CHECK(s.heading == Quat::identity());
  CHECK(near_rotation(s.inclination, flip, 1e-15));
}

TEST_CASE("slerp") {
  const Quat a = Quat::identity();
  const Quat b = q_axis_deg({0, 1, 0}, 80);
  CHECK(near_rotation(slerp(a, b, 0.0), a, 1e-12));
  CHECK(near_rotation(slerp(a, b, 1.0), b, 1e-12));
  CHECK(near_rotation(slerp(a, b, 0.25), q_axis_deg({0, 1, 0}, 20), 1e-12));
  // Shortest arc regardless of sign.
  CHECK(near_rotation(slerp(a, -b, 0.5), q_axis_deg({0, 1, 0}, 40), 1e-12));
  oracle::Random rnd(11);
  for (int k = 0; k < 200; ++k) {
    const Quat p = rnd.quat(), q = rnd.quat();
    CHECK(slerp(p, q, rnd.uniform(0, 1)).norm() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("normalized maps zero to identity") {
  CHECK(Quat{0, 0, 0, 0}.normalized() == Quat::identity());
  CHECK(near(Quat{2, 0, 0, 0}.normalized(), Quat::identity(), 1e-15));
}
