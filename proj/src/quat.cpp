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

#include "ring/quat.hpp"

#include <algorithm>

#include "ring/error.hpp"

namespace ring {
namespace {

// Angles below this are reported as exactly zero.
constexpr double kAngleFloor = 1e-7;

}  // namespace

Quat Quat::normalized() const {
  const double n = norm();
  if (n == 0.0) return Quat::identity();
  return {w / n, x / n, y / n, z / n};
}

Quat quat_mul(const Quat& a, const Quat& b) { return hamilton(a, b).normalized(); }

Vec3 quat_rotate(const Quat& q, const Vec3& v) {
  // v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u = q.vec();
  const Vec3 t = cross(u, v) * 2.0;
  return v + t * q.w + cross(u, t);
}

Quat quat_from_axis_angle(const Vec3& axis, double angle_rad) {
  if (angle_rad == 0.0) return Quat::identity();
  const double n = norm(axis);
  if (n <= 1e-12) fail(ErrorCode::kInvalidArgument, "quat_from_axis_angle: degenerate axis");
  const double s = std::sin(0.5 * angle_rad) / n;
  return Quat{std::cos(0.5 * angle_rad), axis.x * s, axis.y * s, axis.z * s}.normalized();
}

AxisAngle quat_to_axis_angle(const Quat& q_in) {
  Quat q = q_in.normalized();
  if (q.w < 0.0) q = -q;
  const double s = norm(q.vec());
  AxisAngle out;
  out.angle = 2.0 * std::atan2(s, q.w);
  if (s > 0.0) out.axis = q.vec() / s;
  return out;
}

Quat quat_from_rotvec(const Vec3& rv) {
  const double angle = norm(rv);
  if (angle == 0.0) return Quat::identity();
  return quat_from_axis_angle(rv / angle, angle);
}

Vec3 quat_to_rotvec(const Quat& q) {
  const AxisAngle aa = quat_to_axis_angle(q);
  return aa.axis * aa.angle;
}

double quat_angle_rad(const Quat& a, const Quat& b) {
  // Relative rotation conj(a) * b; atan2 keeps precision near zero where
  // 2*acos(|<a,b>|) would not. Both parts are formed so that swapping a and b
  // only negates them, which keeps the result exactly symmetric.
  const Vec3 v = (b.vec() * a.w - a.vec() * b.w) - cross(a.vec(), b.vec());
  const double angle = 2.0 * std::atan2(norm(v), std::abs(dot(a, b)));
  return angle < kAngleFloor ? 0.0 : std::clamp(angle, 0.0, kPi);
}

double quat_angle_deg(const Quat& a, const Quat& b) { return quat_angle_rad(a, b) * kDegPerRad; }

Quat quat_integrate(const Quat& q, const Vec3& omega, double dt) {
  if (omega == Vec3{}) return q;
  return quat_mul(q, quat_from_rotvec(omega * dt));
}

HeadingSplit heading_decompose(const Quat& q_in, const Vec3& up) {
  const Quat q = q_in.normalized();
  const double p = dot(q.vec(), up);
  const Quat twist{q.w, up.x * p, up.y * p, up.z * p};
  const double n = twist.norm();
  HeadingSplit out;
  if (n < 1e-12) {
    out.heading = Quat::identity();
    out.inclination = q;
    return out;
  }
  out.heading = Quat{twist.w / n, twist.x / n, twist.y / n, twist.z / n};
  out.inclination = hamilton(out.heading.conj(), q);
  return out;
}

Quat slerp(const Quat& a, const Quat& b_in, double u) {
  Quat b = b_in;
  double c = dot(a, b);
  if (c < 0.0) {
    b = -b;
    c = -c;
  }
  if (c > 0.9995) {
    return Quat{a.w + u * (b.w - a.w), a.x + u * (b.x - a.x), a.y + u * (b.y - a.y),
                a.z + u * (b.z - a.z)}
        .normalized();
  }
  const double theta = std::acos(std::clamp(c, -1.0, 1.0));
  const double s = std::sin(theta);
  const double wa = std::sin((1.0 - u) * theta) / s;
  const double wb = std::sin(u * theta) / s;
  return Quat{wa * a.w + wb * b.w, wa * a.x + wb * b.x, wa * a.y + wb * b.y, wa * a.z + wb * b.z}
      .normalized();
}

}  // namespace ring
