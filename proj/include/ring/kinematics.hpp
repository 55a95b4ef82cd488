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

// Kinematic chains: parent-array topology, hinge joints, forward kinematics.

#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "ring/quat.hpp"

namespace ring {

// Tree topology. Bodies are numbered 1..N; parents[i-1] is the parent of
// body i and 0 denotes the earth frame.
struct ParentArray {
  std::vector<int> parents;

  std::size_t size() const { return parents.size(); }
  // Parent of body i (1-based), 0 for earth.
  int parent_of(int body) const { return parents[static_cast<std::size_t>(body - 1)]; }

  static ParentArray chain(std::size_t n);
};

enum class ParentArrayFault {
  kNone,
  kEmpty,
  kOutOfRange,
  kCycle,             // a body is its own ancestor
  kForwardReference,  // parent numbered after its child
  kRootCount,         // not exactly one body attached to earth
};

// First violation found, scanning bodies in order.
ParentArrayFault check_parent_array(const ParentArray& lambda);

// Throws ErrorCode::kInvalidArgument naming the fault from check_parent_array.
void validate_parent_array(const ParentArray& lambda);

// Child lists indexed by 0-based body index; entries are 0-based as well.
std::vector<std::vector<int>> children_of(const ParentArray& lambda);

struct RigidAttachment {
  Vec3 offset;  // IMU position in the body frame (m)
};

struct NonrigidAttachment {
  Vec3 offset;
  double stiffness_t = 1.0;  // 1/s^2, unit mass
  double damping_t = 1.0;    // 1/s
  double stiffness_r = 1.0;  // 1/s^2, unit inertia
  double damping_r = 1.0;    // 1/s
};

using ImuAttachment = std::variant<std::monostate, RigidAttachment, NonrigidAttachment>;

struct ChainConfig {
  std::size_t n = 0;
  std::vector<double> segment_lengths;  // m, one per body
  // Hinge axis of the joint between body i and its parent, in the parent
  // frame. Entries of bodies attached to earth are unused (set to +z).
  std::vector<Vec3> joint_axes;
  std::vector<ImuAttachment> imu_attachment;
  std::vector<bool> axis_known;
  std::vector<bool> imu_present;
};

// Throws ErrorCode::kInvalidArgument on a non-positive length, a non-unit
// axis, a non-positive spring-damper parameter or inconsistent sizes.
void validate_chain_config(const ChainConfig& config);

struct BodyPose {
  Quat orientation;  // body -> world
  Vec3 position;     // m, world frame
};

// Joint angles are indexed by body (size N); entries of bodies attached to
// earth are ignored because their pose is supplied by `base_pose`. Each body's
// origin sits at its inboard joint and the outboard joint lies at
// segment_length along the body's local x-axis.
std::vector<BodyPose> forward_kinematics(const ChainConfig& config, const ParentArray& lambda,
                                         const BodyPose& base_pose,
                                         const std::vector<double>& joint_angles);

// q_{i -> parent(i)}; for bodies attached to earth this is the body-to-world
// orientation.
Quat relative_orientation(const std::vector<BodyPose>& poses, const ParentArray& lambda, int body);

// Pose of a rigidly attached IMU.
BodyPose rigid_imu_pose(const BodyPose& body, const Vec3& offset);

}  // namespace ring
