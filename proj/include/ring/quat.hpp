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

// Quaternion and 3-vector algebra.
//
// Convention: Hamilton product, scalar-first storage (w, x, y, z). A
// quaternion q_{i->j} maps coordinates of a frame-i vector into frame j:
//   v_j = q_{i->j} * v_i * conj(q_{i->j}).
// Composition reads right to left: quat_mul(a, b) applies b, then a.

#pragma once

#include <cmath>

namespace ring {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

struct Quat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quat identity() { return {}; }

  constexpr Vec3 vec() const { return {x, y, z}; }
  constexpr Quat conj() const { return {w, -x, -y, -z}; }
  constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;

  constexpr bool operator==(const Quat&) const = default;
};

constexpr double dot(const Quat& a, const Quat& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

// Raw Hamilton product without renormalization.
constexpr Quat hamilton(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

// Composition "apply b, then a", renormalized.
Quat quat_mul(const Quat& a, const Quat& b);

Vec3 quat_rotate(const Quat& q, const Vec3& v);

// Throws ErrorCode::kInvalidArgument for a degenerate axis with nonzero angle.
Quat quat_from_axis_angle(const Vec3& axis, double angle_rad);

struct AxisAngle {
  Vec3 axis{1.0, 0.0, 0.0};
  double angle = 0.0;  // [0, pi]
};

AxisAngle quat_to_axis_angle(const Quat& q);

// Rotation vector (axis * angle) <-> quaternion.
Quat quat_from_rotvec(const Vec3& rv);
Vec3 quat_to_rotvec(const Quat& q);

// Sign-invariant angle between two rotations, in [0, pi].
double quat_angle_rad(const Quat& a, const Quat& b);
double quat_angle_deg(const Quat& a, const Quat& b);

// One strapdown step: q composed with exp(omega * dt), omega in the local frame.
Quat quat_integrate(const Quat& q, const Vec3& omega, double dt);

struct HeadingSplit {
  Quat heading;      // pure rotation about `up`
  Quat inclination;  // q = heading * inclination
};

// Swing-twist split with the twist on the world (left) side.
HeadingSplit heading_decompose(const Quat& q, const Vec3& up);

// Shortest-arc spherical interpolation, u in [0, 1].
Quat slerp(const Quat& a, const Quat& b, double u);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;

}  // namespace ring
