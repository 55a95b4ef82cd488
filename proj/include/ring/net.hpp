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

// RING: message-passing recurrent orientation estimator.
//
// Per node and timestep:
//   1. message   = f(gru2 state)                      f: R^H -> R^M
//   2. input     = [parent message | sum of child messages | X_t[i]]
//   3. gru1      = GRUCell(gru1, input)
//      gru2      = GRUCell(gru2, LayerNorm(gru1))
//   4. raw quat  = h(gru2)                            h: LayerNorm, MLP R^H -> R^4
//   5. output    = raw quat / |raw quat|
// The same parameters serve every node of every graph.

#pragma once

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ring/kinematics.hpp"
#include "ring/quat.hpp"
#include "ring/rcmg.hpp"

namespace ring {

inline constexpr double kLayerNormEps = 1e-6;

enum class Block : std::size_t {
  kMessageW1, kMessageB1, kMessageW2, kMessageB2,
  kGru1Wx, kGru1Wh, kGru1B,
  kNorm1Gain, kNorm1Offset,
  kGru2Wx, kGru2Wh, kGru2B,
  kNorm2Gain, kNorm2Offset,
  kQuatW1, kQuatB1, kQuatW2, kQuatB2,
  kCount,
};

struct TensorSpec {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t offset = 0;  // into the flat value vector, column-major
};

using MatrixMap = Eigen::Map<Eigen::MatrixXd>;
using ConstMatrixMap = Eigen::Map<const Eigen::MatrixXd>;

// Weights of one GRU cell; gate rows are ordered reset, update, candidate.
struct GruView {
  ConstMatrixMap wx;  // 3H x D
  ConstMatrixMap wh;  // 3H x H
  ConstMatrixMap b;   // 3H x 1
};

// Flat parameter vector with a fixed named layout. Also used for gradients
// and optimizer moments.
class RingParams {
 public:
  RingParams() = default;
  // Zero-filled. M = 0 disables messages entirely.
  RingParams(std::size_t hidden, std::size_t message);

  std::size_t hidden() const { return hidden_; }
  std::size_t message() const { return message_; }
  std::size_t input_width() const { return 2 * message_ + kChannels; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<TensorSpec>& layout() const { return layout_; }
  MatrixMap block(Block b);
  ConstMatrixMap block(Block b) const;

  GruView gru1() const { return {block(Block::kGru1Wx), block(Block::kGru1Wh), block(Block::kGru1B)}; }
  GruView gru2() const { return {block(Block::kGru2Wx), block(Block::kGru2Wh), block(Block::kGru2B)}; }

  bool all_finite() const;
  bool same_shape(const RingParams& o) const { return hidden_ == o.hidden_ && message_ == o.message_; }
  bool operator==(const RingParams& o) const { return same_shape(o) && values_ == o.values_; }

  // 11 H^2 + 7 H M + 46 H + M + 4
  static std::size_t count(std::size_t hidden, std::size_t message);
  static std::vector<TensorSpec> make_layout(std::size_t hidden, std::size_t message);

 private:
  std::size_t hidden_ = 0;
  std::size_t message_ = 0;
  std::vector<TensorSpec> layout_;
  // Over-aligned so that every block starts at the same offset from a SIMD
  // boundary in every copy; Eigen's reductions depend on that offset, and
  // this keeps results bit-identical across copies of the same parameters.
  std::vector<double, Eigen::aligned_allocator<double>> values_;
};

// Glorot-uniform weights (per gate block for GRU matrices), zero biases,
// unit LayerNorm gains. Deterministic in seed.
RingParams init_params(std::size_t hidden, std::size_t message, std::uint64_t seed);

// Glorot-uniform bound of a weight block, or 0 for biases/offsets.
double init_bound(const RingParams& params, Block b);

// h' = (1 - z) * n + z * h, with
//   r = sigmoid(Wr x + Ur h + br), z = sigmoid(Wz x + Uz h + bz),
//   n = tanh(Wn x + Un (r * h) + bn).
Eigen::VectorXd gru_cell(const Eigen::VectorXd& h, const Eigen::VectorXd& x, const GruView& w);

struct GruCellGrad {
  Eigen::VectorXd dh;  // dL/dh
  Eigen::VectorXd dx;  // dL/dx
};

// Vector-Jacobian product of gru_cell for upstream gradient dout.
GruCellGrad gru_cell_vjp(const Eigen::VectorXd& h, const Eigen::VectorXd& x, const GruView& w,
                         const Eigen::VectorXd& dout);

Eigen::VectorXd layer_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gain,
                           const Eigen::VectorXd& offset);

// Hidden state xi, stored as two H x N blocks (one column per node).
struct RingState {
  Eigen::MatrixXd gru1;
  Eigen::MatrixXd gru2;

  static RingState zeros(std::size_t hidden, std::size_t nodes);
  std::size_t nodes() const { return static_cast<std::size_t>(gru1.cols()); }
  // N x 2H view: row i is [gru1 state | gru2 state] of node i.
  Eigen::MatrixXd stacked() const;
  bool operator==(const RingState& o) const { return gru1 == o.gru1 && gru2 == o.gru2; }
};

struct StepResult {
  RingState state;
  std::vector<Quat> orientations;  // one unit quaternion per node
};

// x_t holds N rows of 10 channels, row-major (the TrainingPair layout).
// Throws ErrorCode::kShapeMismatch on width mismatches and
// ErrorCode::kNonFinite if the new state is not finite.
StepResult ring_step(const RingState& prev, std::span<const double> x_t, const ParentArray& lambda,
                     const RingParams& params);

// Unroll from `initial` (zeros when null) over X (T x N x 10, row-major).
// Returns T x N orientations, row-major; the final state is written to
// `final_state` when given.
std::vector<Quat> ring_apply(std::span<const double> X, std::size_t T, const ParentArray& lambda,
                             const RingParams& params, const RingState* initial = nullptr,
                             RingState* final_state = nullptr);

inline std::vector<Quat> ring_apply(const TrainingPair& pair, const RingParams& params) {
  return ring_apply(pair.X, pair.T, pair.lambda, params);
}

// Online estimator for one graph: owns its state and scratch buffers so a
// step allocates nothing after the first call.
class RingStepper {
 public:
  RingStepper(RingParams params, ParentArray lambda);
  ~RingStepper();
  RingStepper(RingStepper&&) noexcept;
  RingStepper& operator=(RingStepper&&) noexcept;

  // x_t: N x 10 row-major. Returns N unit quaternions (w, x, y, z).
  std::span<const Quat> step(std::span<const double> x_t);
  void reset();

  const RingState& state() const;
  const ParentArray& parents() const;
  const RingParams& params() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ring
