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

#include "ring/kinematics.hpp"

#include <cmath>
#include <string>

#include "ring/error.hpp"

namespace ring {

ParentArray ParentArray::chain(std::size_t n) {
  ParentArray out;
  out.parents.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.parents[i] = static_cast<int>(i);
  return out;
}

ParentArrayFault check_parent_array(const ParentArray& lambda) {
  const int n = static_cast<int>(lambda.size());
  if (n == 0) return ParentArrayFault::kEmpty;
  int roots = 0;
  for (int body = 1; body <= n; ++body) {
    const int p = lambda.parent_of(body);
    if (p < 0 || p > n) return ParentArrayFault::kOutOfRange;
    if (p == body) return ParentArrayFault::kCycle;
    // Any longer cycle needs at least one parent numbered after its child.
    if (p > body) return ParentArrayFault::kForwardReference;
    if (p == 0) ++roots;
  }
  return roots == 1 ? ParentArrayFault::kNone : ParentArrayFault::kRootCount;
}

void validate_parent_array(const ParentArray& lambda) {
  switch (check_parent_array(lambda)) {
    case ParentArrayFault::kNone:
      return;
    case ParentArrayFault::kEmpty:
      fail(ErrorCode::kInvalidArgument, "parent array: empty");
    case ParentArrayFault::kOutOfRange:
      fail(ErrorCode::kInvalidArgument, "parent array: parent index out of range");
    case ParentArrayFault::kCycle:
      fail(ErrorCode::kInvalidArgument, "parent array: cycle");
    case ParentArrayFault::kForwardReference:
      fail(ErrorCode::kInvalidArgument, "parent array: forward reference (parent after child)");
    case ParentArrayFault::kRootCount:
      fail(ErrorCode::kInvalidArgument, "parent array: expected exactly one body attached to earth");
  }
}

std::vector<std::vector<int>> children_of(const ParentArray& lambda) {
  std::vector<std::vector<int>> out(lambda.size());
  for (int body = 1; body <= static_cast<int>(lambda.size()); ++body) {
    const int p = lambda.parent_of(body);
    if (p > 0) out[static_cast<std::size_t>(p - 1)].push_back(body - 1);
  }
  return out;
}

void validate_chain_config(const ChainConfig& c) {
  const std::size_t n = c.n;
  if (c.segment_lengths.size() != n || c.joint_axes.size() != n || c.imu_attachment.size() != n ||
      c.axis_known.size() != n || c.imu_present.size() != n)
    fail(ErrorCode::kInvalidArgument, "chain config: per-body vectors must have size N");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.segment_lengths[i] > 0.0))
      fail(ErrorCode::kInvalidArgument, "chain config: segment length must be positive");
    if (std::abs(norm(c.joint_axes[i]) - 1.0) > 1e-9)
      fail(ErrorCode::kInvalidArgument, "chain config: joint axis must be unit norm");
    if (const auto* nr = std::get_if<NonrigidAttachment>(&c.imu_attachment[i])) {
      if (!(nr->stiffness_t > 0.0 && nr->damping_t > 0.0 && nr->stiffness_r > 0.0 &&
            nr->damping_r > 0.0))
        fail(ErrorCode::kInvalidArgument, "chain config: spring-damper parameters must be positive");
    }
  }
}

std::vector<BodyPose> forward_kinematics(const ChainConfig& config, const ParentArray& lambda,
                                         const BodyPose& base_pose,
                                         const std::vector<double>& joint_angles) {
  const std::size_t n = lambda.size();
  if (config.n != n || joint_angles.size() != n)
    fail(ErrorCode::kInvalidArgument,
         "forward_kinematics: expected " + std::to_string(n) + " joint angles, got " +
             std::to_string(joint_angles.size()));
  std::vector<BodyPose> poses(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int p = lambda.parents[i];
    if (p == 0) {
      poses[i] = base_pose;
      continue;
    }
    const BodyPose& parent = poses[static_cast<std::size_t>(p - 1)];
    const Quat hinge = quat_from_axis_angle(config.joint_axes[i], joint_angles[i]);
    const Vec3 joint_offset{config.segment_lengths[static_cast<std::size_t>(p - 1)], 0.0, 0.0};
    poses[i].orientation = quat_mul(parent.orientation, hinge);
    poses[i].position = parent.position + quat_rotate(parent.orientation, joint_offset);
  }
  return poses;
}

Quat relative_orientation(const std::vector<BodyPose>& poses, const ParentArray& lambda, int body) {
  const Quat& q = poses[static_cast<std::size_t>(body - 1)].orientation;
  const int p = lambda.parent_of(body);
  if (p == 0) return q;
  return quat_mul(poses[static_cast<std::size_t>(p - 1)].orientation.conj(), q);
}

BodyPose rigid_imu_pose(const BodyPose& body, const Vec3& offset) {
  return {body.orientation, body.position + quat_rotate(body.orientation, offset)};
}

}  // namespace ring
