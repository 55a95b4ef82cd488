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

#include "ring/net.hpp"

#include <cmath>
#include <random>

#include "engine.hpp"
#include "ring/error.hpp"

namespace ring {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

}  // namespace

// --- parameters -----------------------------------------------------------

std::vector<TensorSpec> RingParams::make_layout(std::size_t H, std::size_t M) {
  const std::size_t D = 2 * M + kChannels;
  std::vector<TensorSpec> l = {
      {"message.w1", H, H}, {"message.b1", H, 1}, {"message.w2", M, H}, {"message.b2", M, 1},
      {"gru1.wx", 3 * H, D}, {"gru1.wh", 3 * H, H}, {"gru1.b", 3 * H, 1},
      {"norm1.gain", H, 1}, {"norm1.offset", H, 1},
      {"gru2.wx", 3 * H, H}, {"gru2.wh", 3 * H, H}, {"gru2.b", 3 * H, 1},
      {"norm2.gain", H, 1}, {"norm2.offset", H, 1},
      {"quat.w1", H, H}, {"quat.b1", H, 1}, {"quat.w2", 4, H}, {"quat.b2", 4, 1},
  };
  std::size_t offset = 0;
  for (auto& t : l) {
    t.offset = offset;
    offset += t.rows * t.cols;
  }
  return l;
}

std::size_t RingParams::count(std::size_t H, std::size_t M) {
  return 11 * H * H + 7 * H * M + 46 * H + M + 4;
}

RingParams::RingParams(std::size_t hidden, std::size_t message)
    : hidden_(hidden), message_(message), layout_(make_layout(hidden, message)) {
  if (hidden == 0) fail(ErrorCode::kInvalidArgument, "RingParams: hidden width must be >= 1");
  const TensorSpec& last = layout_.back();
  values_.assign(last.offset + last.rows * last.cols, 0.0);
}

MatrixMap RingParams::block(Block b) {
  const TensorSpec& t = layout_[static_cast<std::size_t>(b)];
  return {values_.data() + t.offset, static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols)};
}

ConstMatrixMap RingParams::block(Block b) const {
  const TensorSpec& t = layout_[static_cast<std::size_t>(b)];
  return {values_.data() + t.offset, static_cast<Eigen::Index>(t.rows), static_cast<Eigen::Index>(t.cols)};
}

bool RingParams::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double init_bound(const RingParams& p, Block b) {
  const double H = static_cast<double>(p.hidden());
  const double M = static_cast<double>(p.message());
  const double D = static_cast<double>(p.input_width());
  auto glorot = [](double fan_in, double fan_out) {
    return fan_in + fan_out > 0.0 ? std::sqrt(6.0 / (fan_in + fan_out)) : 0.0;
  };
  switch (b) {
    case Block::kMessageW1: return glorot(H, H);
    case Block::kMessageW2: return glorot(H, M);
    case Block::kGru1Wx: return glorot(D, H);
    case Block::kGru1Wh: return glorot(H, H);
    case Block::kGru2Wx: return glorot(H, H);
    case Block::kGru2Wh: return glorot(H, H);
    case Block::kQuatW1: return glorot(H, H);
    case Block::kQuatW2: return glorot(H, 4.0);
    default: return 0.0;
  }
}

RingParams init_params(std::size_t hidden, std::size_t message, std::uint64_t seed) {
  RingParams p(hidden, message);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < static_cast<std::size_t>(Block::kCount); ++i) {
    const auto b = static_cast<Block>(i);
    auto m = p.block(b);
    if (b == Block::kNorm1Gain || b == Block::kNorm2Gain) {
      m.setOnes();
      continue;
    }
    const double bound = init_bound(p, b);
    if (bound == 0.0) continue;
    std::uniform_real_distribution<double> u(-bound, bound);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = u(rng);
  }
  return p;
}

// --- engine ---------------------------------------------------------------

namespace detail {

Topology Topology::from_graphs(const std::vector<const ParentArray*>& graphs) {
  Topology t;
  for (const ParentArray* g : graphs) t.cols += g->size();
  t.parent.assign(t.cols, -1);
  std::vector<std::vector<int>> kids(t.cols);
  int base = 0;
  for (const ParentArray* g : graphs) {
    for (std::size_t i = 0; i < g->size(); ++i) {
      const int p = g->parents[i];
      if (p > 0) {
        t.parent[base + i] = base + p - 1;
        kids[static_cast<std::size_t>(base + p - 1)].push_back(base + static_cast<int>(i));
      }
    }
    base += static_cast<int>(g->size());
  }
  t.child_offsets.assign(t.cols + 1, 0);
  for (std::size_t j = 0; j < t.cols; ++j) {
    t.child_offsets[j + 1] = t.child_offsets[j] + static_cast<int>(kids[j].size());
    t.children.insert(t.children.end(), kids[j].begin(), kids[j].end());
  }
  return t;
}

Topology Topology::replicate(const ParentArray& lambda, std::size_t copies) {
  return from_graphs(std::vector<const ParentArray*>(copies, &lambda));
}

void gru_forward(const GruView& w, const Eigen::MatrixXd& h, const Eigen::MatrixXd& x, GruCache& c,
                 Eigen::MatrixXd& out) {
  const Eigen::Index H = h.rows();
  Eigen::MatrixXd gx = w.wx * x;
  gx.colwise() += w.b.col(0);
  Eigen::MatrixXd rz = gx.topRows(2 * H);
  rz.noalias() += w.wh.topRows(2 * H) * h;
  c.r = sigmoid(rz.topRows(H));
  c.z = sigmoid(rz.bottomRows(H));
  c.rh = c.r.cwiseProduct(h);
  Eigen::MatrixXd an = gx.bottomRows(H);
  an.noalias() += w.wh.bottomRows(H) * c.rh;
  c.n = an.array().tanh().matrix();
  out = (1.0 - c.z.array()) * c.n.array() + c.z.array() * h.array();
}

void gru_backward(const GruView& w, const Eigen::MatrixXd& h, const Eigen::MatrixXd& x,
                  const GruCache& c, const Eigen::MatrixXd& dout, Eigen::MatrixXd& dh,
                  Eigen::MatrixXd& dx, GruGrad* grad) {
  const Eigen::Index H = h.rows();
  const Eigen::Index K = h.cols();
  Eigen::MatrixXd g(3 * H, K);
  auto dz = (dout.array() * (h.array() - c.n.array())).eval();
  auto dn = (dout.array() * (1.0 - c.z.array())).eval();
  g.bottomRows(H) = (dn * (1.0 - c.n.array().square())).matrix();
  Eigen::MatrixXd drh = w.wh.bottomRows(H).transpose() * g.bottomRows(H);
  dh = (dout.array() * c.z.array() + drh.array() * c.r.array()).matrix();
  g.topRows(H) = (drh.array() * h.array() * c.r.array() * (1.0 - c.r.array())).matrix();
  g.middleRows(H, H) = (dz * c.z.array() * (1.0 - c.z.array())).matrix();
  dx.noalias() = w.wx.transpose() * g;
  dh.noalias() += w.wh.topRows(2 * H).transpose() * g.topRows(2 * H);
  if (grad != nullptr) {
    grad->wx.noalias() += g * x.transpose();
    grad->wh.topRows(2 * H).noalias() += g.topRows(2 * H) * h.transpose();
    grad->wh.bottomRows(H).noalias() += g.bottomRows(H) * c.rh.transpose();
    grad->b += g.rowwise().sum();
  }
}

void norm_forward(const Eigen::MatrixXd& x, ConstMatrixMap gain, ConstMatrixMap offset, NormCache& c) {
  const double H = static_cast<double>(x.rows());
  const Eigen::RowVectorXd mean = x.colwise().sum() / H;
  c.xhat = x.rowwise() - mean;
  const Eigen::RowVectorXd var = c.xhat.colwise().squaredNorm() / H;
  c.inv_std = (var.array() + kLayerNormEps).rsqrt().matrix();
  c.xhat = c.xhat * c.inv_std.asDiagonal();
  c.out = gain.col(0).asDiagonal() * c.xhat;
  c.out.colwise() += offset.col(0);
}

void norm_backward(const NormCache& c, ConstMatrixMap gain, const Eigen::MatrixXd& dy,
                   Eigen::MatrixXd& dx, MatrixMap* dgain, MatrixMap* doffset) {
  const double H = static_cast<double>(dy.rows());
  if (dgain != nullptr) *dgain += dy.cwiseProduct(c.xhat).rowwise().sum();
  if (doffset != nullptr) *doffset += dy.rowwise().sum();
  const Eigen::MatrixXd dxhat = gain.col(0).asDiagonal() * dy;
  const Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
  const Eigen::RowVectorXd sum_dx = dxhat.cwiseProduct(c.xhat).colwise().sum();
  dx = H * dxhat;
  dx.rowwise() -= sum_d;
  dx -= c.xhat * sum_dx.asDiagonal();
  dx = dx * (c.inv_std / H).asDiagonal();
}

void forward_step(const RingParams& p, const Topology& topo, const Eigen::MatrixXd& s1_prev,
                  const Eigen::MatrixXd& s2_prev, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  StepCache& c, Eigen::MatrixXd& s1, Eigen::MatrixXd& s2) {
  const auto M = static_cast<Eigen::Index>(p.message());
  const auto K = static_cast<Eigen::Index>(topo.cols);

  // 1. messages from the top GRU state
  c.msg_hidden = p.block(Block::kMessageW1) * s2_prev;
  c.msg_hidden.colwise() += p.block(Block::kMessageB1).col(0);
  c.msg_hidden = c.msg_hidden.array().tanh().matrix();
  c.msg = p.block(Block::kMessageW2) * c.msg_hidden;
  c.msg.colwise() += p.block(Block::kMessageB2).col(0);

  // 2. parent message, summed child messages and the node input
  c.input.setZero(2 * M + static_cast<Eigen::Index>(kChannels), K);
  for (Eigen::Index j = 0; j < K; ++j) {
    if (M > 0) {
      const int parent = topo.parent[static_cast<std::size_t>(j)];
      if (parent >= 0) c.input.col(j).head(M) = c.msg.col(parent);
      for (int k = topo.child_offsets[static_cast<std::size_t>(j)];
           k < topo.child_offsets[static_cast<std::size_t>(j) + 1]; ++k)
        c.input.col(j).segment(M, M) += c.msg.col(topo.children[static_cast<std::size_t>(k)]);
    }
  }
  c.input.bottomRows(static_cast<Eigen::Index>(kChannels)) = x;

  // 3. stacked GRU update
  gru_forward(p.gru1(), s1_prev, c.input, c.gru1, s1);
  norm_forward(s1, p.block(Block::kNorm1Gain), p.block(Block::kNorm1Offset), c.norm1);
  gru_forward(p.gru2(), s2_prev, c.norm1.out, c.gru2, s2);

  // 4. quaternion head
  norm_forward(s2, p.block(Block::kNorm2Gain), p.block(Block::kNorm2Offset), c.norm2);
  c.head_hidden = p.block(Block::kQuatW1) * c.norm2.out;
  c.head_hidden.colwise() += p.block(Block::kQuatB1).col(0);
  c.head_hidden = c.head_hidden.array().tanh().matrix();
  c.raw = p.block(Block::kQuatW2) * c.head_hidden;
  c.raw.colwise() += p.block(Block::kQuatB2).col(0);

  // 5. normalize; a zero row maps to identity
  c.raw_norm = c.raw.colwise().norm();
  c.out.resize(4, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    if (c.raw_norm(j) > 1e-12) {
      c.out.col(j) = c.raw.col(j) / c.raw_norm(j);
    } else {
      c.out.col(j) << 1.0, 0.0, 0.0, 0.0;
    }
  }
}

void backward_step(const RingParams& p, const Topology& topo, const Eigen::MatrixXd& s1_prev,
                   const Eigen::MatrixXd& s2_prev, const StepCache& c, const Eigen::MatrixXd& dout,
                   Eigen::MatrixXd& ds1, Eigen::MatrixXd& ds2, RingParams& grad) {
  const auto M = static_cast<Eigen::Index>(p.message());
  const auto K = static_cast<Eigen::Index>(topo.cols);

  // 5. normalization
  Eigen::MatrixXd draw(4, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    if (c.raw_norm(j) > 1e-12) {
      const auto y = c.out.col(j);
      draw.col(j) = (dout.col(j) - y * y.dot(dout.col(j))) / c.raw_norm(j);
    } else {
      draw.col(j).setZero();
    }
  }

  // 4. quaternion head
  grad.block(Block::kQuatW2).noalias() += draw * c.head_hidden.transpose();
  grad.block(Block::kQuatB2) += draw.rowwise().sum();
  Eigen::MatrixXd dpre = p.block(Block::kQuatW2).transpose() * draw;
  dpre.array() *= 1.0 - c.head_hidden.array().square();
  grad.block(Block::kQuatW1).noalias() += dpre * c.norm2.out.transpose();
  grad.block(Block::kQuatB1) += dpre.rowwise().sum();
  const Eigen::MatrixXd dnorm2 = p.block(Block::kQuatW1).transpose() * dpre;
  Eigen::MatrixXd tmp;
  {
    MatrixMap dg = grad.block(Block::kNorm2Gain);
    MatrixMap db = grad.block(Block::kNorm2Offset);
    norm_backward(c.norm2, p.block(Block::kNorm2Gain), dnorm2, tmp, &dg, &db);
  }
  ds2 += tmp;

  // 3. stacked GRU
  Eigen::MatrixXd ds2_prev, dnorm1, ds1_prev, dinput;
  {
    GruGrad g2{grad.block(Block::kGru2Wx), grad.block(Block::kGru2Wh), grad.block(Block::kGru2B)};
    gru_backward(p.gru2(), s2_prev, c.norm1.out, c.gru2, ds2, ds2_prev, dnorm1, &g2);
  }
  {
    MatrixMap dg = grad.block(Block::kNorm1Gain);
    MatrixMap db = grad.block(Block::kNorm1Offset);
    norm_backward(c.norm1, p.block(Block::kNorm1Gain), dnorm1, tmp, &dg, &db);
  }
  ds1 += tmp;
  {
    GruGrad g1{grad.block(Block::kGru1Wx), grad.block(Block::kGru1Wh), grad.block(Block::kGru1B)};
    gru_backward(p.gru1(), s1_prev, c.input, c.gru1, ds1, ds1_prev, dinput, &g1);
  }

  // 2./1. message routing and message MLP
  if (M > 0) {
    Eigen::MatrixXd dmsg = Eigen::MatrixXd::Zero(M, K);
    for (Eigen::Index j = 0; j < K; ++j) {
      const int parent = topo.parent[static_cast<std::size_t>(j)];
      if (parent >= 0) dmsg.col(parent) += dinput.col(j).head(M);
      for (int k = topo.child_offsets[static_cast<std::size_t>(j)];
           k < topo.child_offsets[static_cast<std::size_t>(j) + 1]; ++k)
        dmsg.col(topo.children[static_cast<std::size_t>(k)]) += dinput.col(j).segment(M, M);
    }
    grad.block(Block::kMessageW2).noalias() += dmsg * c.msg_hidden.transpose();
    grad.block(Block::kMessageB2) += dmsg.rowwise().sum();
    Eigen::MatrixXd dh = p.block(Block::kMessageW2).transpose() * dmsg;
    dh.array() *= 1.0 - c.msg_hidden.array().square();
    grad.block(Block::kMessageW1).noalias() += dh * s2_prev.transpose();
    grad.block(Block::kMessageB1) += dh.rowwise().sum();
    ds2_prev.noalias() += p.block(Block::kMessageW1).transpose() * dh;
  }

  ds1 = std::move(ds1_prev);
  ds2 = std::move(ds2_prev);
}

}  // namespace detail

// --- single-cell helpers -------------------------------------------------

Eigen::VectorXd gru_cell(const Eigen::VectorXd& h, const Eigen::VectorXd& x, const GruView& w) {
  if (w.wh.rows() != 3 * h.size() || w.wx.cols() != x.size())
    fail(ErrorCode::kShapeMismatch, "gru_cell: width mismatch");
  detail::GruCache c;
  Eigen::MatrixXd out;
  detail::gru_forward(w, h, x, c, out);
  return out.col(0);
}

GruCellGrad gru_cell_vjp(const Eigen::VectorXd& h, const Eigen::VectorXd& x, const GruView& w,
                         const Eigen::VectorXd& dout) {
  detail::GruCache c;
  Eigen::MatrixXd out, dh, dx;
  const Eigen::MatrixXd hm = h, xm = x, dm = dout;
  detail::gru_forward(w, hm, xm, c, out);
  detail::gru_backward(w, hm, xm, c, dm, dh, dx, nullptr);
  return {dh.col(0), dx.col(0)};
}

Eigen::VectorXd layer_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& gain,
                           const Eigen::VectorXd& offset) {
  if (gain.size() != x.size() || offset.size() != x.size())
    fail(ErrorCode::kShapeMismatch, "layer_norm: width mismatch");
  detail::NormCache c;
  detail::norm_forward(x, ConstMatrixMap(gain.data(), gain.size(), 1),
                       ConstMatrixMap(offset.data(), offset.size(), 1), c);
  return c.out.col(0);
}

// --- state and stepping ---------------------------------------------------

RingState RingState::zeros(std::size_t hidden, std::size_t nodes) {
  const auto H = static_cast<Eigen::Index>(hidden);
  const auto N = static_cast<Eigen::Index>(nodes);
  return {Eigen::MatrixXd::Zero(H, N), Eigen::MatrixXd::Zero(H, N)};
}

Eigen::MatrixXd RingState::stacked() const {
  Eigen::MatrixXd out(gru1.cols(), gru1.rows() + gru2.rows());
  out << gru1.transpose(), gru2.transpose();
  return out;
}

namespace {

void check_shapes(const RingState& s, std::size_t N, const RingParams& p) {
  const auto H = static_cast<Eigen::Index>(p.hidden());
  if (s.gru1.rows() != H || s.gru2.rows() != H || s.gru1.cols() != static_cast<Eigen::Index>(N) ||
      s.gru2.cols() != static_cast<Eigen::Index>(N))
    fail(ErrorCode::kShapeMismatch, "ring_step: state shape does not match N x 2H");
}

void check_finite_state(const Eigen::MatrixXd& s1, const Eigen::MatrixXd& s2) {
  if (!s1.allFinite() || !s2.allFinite())
    fail(ErrorCode::kNonFinite, "ring_step: hidden state became non-finite");
}

std::vector<Quat> to_quats(const Eigen::MatrixXd& out) {
  std::vector<Quat> q(static_cast<std::size_t>(out.cols()));
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    q[static_cast<std::size_t>(j)] = {out(0, j), out(1, j), out(2, j), out(3, j)};
  return q;
}

}  // namespace

StepResult ring_step(const RingState& prev, std::span<const double> x_t, const ParentArray& lambda,
                     const RingParams& params) {
  const std::size_t N = lambda.size();
  if (x_t.size() != N * kChannels) fail(ErrorCode::kShapeMismatch, "ring_step: input must be N x 10");
  check_shapes(prev, N, params);
  const auto topo = detail::Topology::replicate(lambda, 1);
  const ConstMatrixMap x(x_t.data(), static_cast<Eigen::Index>(kChannels), static_cast<Eigen::Index>(N));
  detail::StepCache cache;
  StepResult r;
  detail::forward_step(params, topo, prev.gru1, prev.gru2, x, cache, r.state.gru1, r.state.gru2);
  check_finite_state(r.state.gru1, r.state.gru2);
  r.orientations = to_quats(cache.out);
  return r;
}

std::vector<Quat> ring_apply(std::span<const double> X, std::size_t T, const ParentArray& lambda,
                             const RingParams& params, const RingState* initial,
                             RingState* final_state) {
  const std::size_t N = lambda.size();
  if (X.size() != T * N * kChannels) fail(ErrorCode::kShapeMismatch, "ring_apply: X must be T x N x 10");
  RingState s = initial != nullptr ? *initial : RingState::zeros(params.hidden(), N);
  check_shapes(s, N, params);
  const auto topo = detail::Topology::replicate(lambda, 1);
  detail::StepCache cache;
  RingState next;
  std::vector<Quat> out;
  out.reserve(T * N);
  const auto rows = static_cast<Eigen::Index>(kChannels);
  const auto cols = static_cast<Eigen::Index>(N);
  for (std::size_t t = 0; t < T; ++t) {
    const ConstMatrixMap x(X.data() + t * N * kChannels, rows, cols);
    detail::forward_step(params, topo, s.gru1, s.gru2, x, cache, next.gru1, next.gru2);
    check_finite_state(next.gru1, next.gru2);
    std::swap(s, next);
    for (Eigen::Index j = 0; j < cols; ++j)
      out.push_back({cache.out(0, j), cache.out(1, j), cache.out(2, j), cache.out(3, j)});
  }
  if (final_state != nullptr) *final_state = std::move(s);
  return out;
}

// --- online stepper -------------------------------------------------------

struct RingStepper::Impl {
  RingParams params;
  ParentArray lambda;
  detail::Topology topo;
  detail::StepCache cache;
  RingState state, next;
  std::vector<Quat> out;
};

RingStepper::RingStepper(RingParams params, ParentArray lambda) : impl_(std::make_unique<Impl>()) {
  validate_parent_array(lambda);
  impl_->topo = detail::Topology::replicate(lambda, 1);
  impl_->state = RingState::zeros(params.hidden(), lambda.size());
  impl_->out.resize(lambda.size());
  impl_->params = std::move(params);
  impl_->lambda = std::move(lambda);
}

RingStepper::~RingStepper() = default;
RingStepper::RingStepper(RingStepper&&) noexcept = default;
RingStepper& RingStepper::operator=(RingStepper&&) noexcept = default;

std::span<const Quat> RingStepper::step(std::span<const double> x_t) {
  Impl& m = *impl_;
  const std::size_t N = m.lambda.size();
  if (x_t.size() != N * kChannels) fail(ErrorCode::kShapeMismatch, "RingStepper: input must be N x 10");
  const ConstMatrixMap x(x_t.data(), static_cast<Eigen::Index>(kChannels), static_cast<Eigen::Index>(N));
  detail::forward_step(m.params, m.topo, m.state.gru1, m.state.gru2, x, m.cache, m.next.gru1, m.next.gru2);
  check_finite_state(m.next.gru1, m.next.gru2);
  std::swap(m.state, m.next);
  for (std::size_t j = 0; j < N; ++j) {
    const auto c = m.cache.out.col(static_cast<Eigen::Index>(j));
    m.out[j] = {c(0), c(1), c(2), c(3)};
  }
  return m.out;
}

void RingStepper::reset() { impl_->state = RingState::zeros(impl_->params.hidden(), impl_->lambda.size()); }

const RingState& RingStepper::state() const { return impl_->state; }
const ParentArray& RingStepper::parents() const { return impl_->lambda; }
const RingParams& RingStepper::params() const { return impl_->params; }

}  // namespace ring
