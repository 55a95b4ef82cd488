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

#include "ring/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "engine.hpp"
#include "parallel.hpp"
#include "ring/error.hpp"
#include "ring/eval.hpp"

namespace ring {
namespace {

// Inclination of a unit quaternion about world z and its Jacobian
// (rows: output component, cols: w, x, y, z).
Quat inclination_with_jacobian(const Quat& q, std::array<std::array<double, 4>, 4>& J) {
  const double n2 = q.w * q.w + q.z * q.z;
  const double n = std::sqrt(n2);
  for (auto& row : J) row.fill(0.0);
  if (n < 1e-12) {
    for (int k = 0; k < 4; ++k) J[k][k] = 1.0;
    return q;
  }
  const double a = q.w * q.x + q.z * q.y;
  const double b = q.w * q.y - q.z * q.x;
  const double n3 = n2 * n;
  J[0] = {q.w / n, 0.0, 0.0, q.z / n};
  J[1] = {q.x / n - a * q.w / n3, q.w / n, q.z / n, q.y / n - a * q.z / n3};
  J[2] = {q.y / n - b * q.w / n3, -q.z / n, q.w / n, -q.x / n - b * q.z / n3};
  return {n, a / n, b / n, 0.0};
}

// Squared angle between unit quaternions and its gradient wrt `estimate`.
double angle_sq(const Quat& est, const Quat& truth, std::array<double, 4>* grad) {
  const double c = dot(est, truth);
  const double sign = c < 0.0 ? -1.0 : 1.0;
  const double ca = std::min(std::abs(c), 1.0);
  const double half = std::acos(ca);
  const double theta = 2.0 * half;
  if (theta < 1e-7) {
    // Counted as an exact match, so the gradient vanishes with the loss.
    if (grad != nullptr) grad->fill(0.0);
    return 0.0;
  }
  if (grad != nullptr) {
    const double s = std::sqrt(std::max(0.0, (1.0 - ca) * (1.0 + ca)));
    const double ratio = s > 1e-8 ? half / s : 1.0;  // half / sin(half) -> 1
    const double k = -8.0 * ratio * sign;
    *grad = {k * truth.w, k * truth.x, k * truth.y, k * truth.z};
  }
  return theta * theta;
}

double body_angle_sq(const Quat& est, const Quat& truth, bool earth, std::array<double, 4>* grad) {
  if (!earth) return angle_sq(est, truth, grad);
  std::array<std::array<double, 4>, 4> J{};
  const Quat s_est = inclination_with_jacobian(est, J);
  std::array<std::array<double, 4>, 4> unused{};
  const Quat s_truth = inclination_with_jacobian(truth, unused);
  std::array<double, 4> g{};
  const double v = angle_sq(s_est, s_truth, grad != nullptr ? &g : nullptr);
  if (grad != nullptr) {
    for (int col = 0; col < 4; ++col) {
      double acc = 0.0;
      for (int row = 0; row < 4; ++row) acc += g[row] * J[row][col];
      (*grad)[col] = acc;
    }
  }
  return v;
}

void project_tangent(const Quat& q, std::array<double, 4>& g) {
  const double d = q.w * g[0] + q.x * g[1] + q.y * g[2] + q.z * g[3];
  g[0] -= d * q.w;
  g[1] -= d * q.x;
  g[2] -= d * q.y;
  g[3] -= d * q.z;
}

void check_loss_shapes(std::span<const Quat> estimate, std::span<const Quat> truth, std::size_t T,
                       const ParentArray& lambda, std::size_t warmup) {
  if (estimate.size() != T * lambda.size() || truth.size() != T * lambda.size())
    fail(ErrorCode::kShapeMismatch, "orientation_loss: shape mismatch");
  if (warmup >= T) fail(ErrorCode::kInvalidArgument, "orientation_loss: warmup must be < T");
}

}  // namespace

double orientation_loss(std::span<const Quat> estimate, std::span<const Quat> truth, std::size_t T,
                        const ParentArray& lambda, std::size_t warmup) {
  check_loss_shapes(estimate, truth, T, lambda, warmup);
  const std::size_t N = lambda.size();
  double sum = 0.0;
  for (std::size_t t = warmup; t < T; ++t)
    for (std::size_t i = 0; i < N; ++i)
      sum += body_angle_sq(estimate[t * N + i], truth[t * N + i], lambda.parents[i] == 0, nullptr);
  return sum / static_cast<double>((T - warmup) * N);
}

LossGradient orientation_loss_gradient(std::span<const Quat> estimate, std::span<const Quat> truth,
                                       std::size_t T, const ParentArray& lambda, std::size_t warmup) {
  check_loss_shapes(estimate, truth, T, lambda, warmup);
  const std::size_t N = lambda.size();
  const double scale = 1.0 / static_cast<double>((T - warmup) * N);
  LossGradient out;
  out.d_estimate.assign(T * N, {0.0, 0.0, 0.0, 0.0});
  for (std::size_t t = warmup; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t k = t * N + i;
      auto& g = out.d_estimate[k];
      out.loss += body_angle_sq(estimate[k], truth[k], lambda.parents[i] == 0, &g) * scale;
      for (double& v : g) v *= scale;
      project_tangent(estimate[k], g);
    }
  }
  return out;
}

std::size_t warmup_steps(double warmup_s, double F) {
  return static_cast<std::size_t>(std::ceil(warmup_s * F - 1e-9));
}

BatchGradient loss_gradient(const RingParams& params, std::span<const TrainingPair* const> batch,
                            double warmup_s, std::size_t truncation, std::size_t threads) {
  if (batch.empty()) fail(ErrorCode::kInvalidArgument, "loss_gradient: empty batch");
  threads = std::min(std::max<std::size_t>(threads, 1), batch.size());
  if (threads > 1) {
    // Shards are combined in a fixed order, weighted by their share of the batch.
    std::vector<BatchGradient> parts(threads);
    detail::parallel_for(threads, threads, [&](std::size_t w) {
      const std::size_t lo = batch.size() * w / threads, hi = batch.size() * (w + 1) / threads;
      parts[w] = loss_gradient(params, batch.subspan(lo, hi - lo), warmup_s, truncation, 1);
    });
    BatchGradient out;
    out.grad = RingParams(params.hidden(), params.message());
    auto acc = out.grad.values();
    for (std::size_t w = 0; w < threads; ++w) {
      const std::size_t lo = batch.size() * w / threads, hi = batch.size() * (w + 1) / threads;
      const double share = static_cast<double>(hi - lo) / static_cast<double>(batch.size());
      out.loss += share * parts[w].loss;
      const auto g = parts[w].grad.values();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += share * g[k];
    }
    return out;
  }
  const std::size_t T = batch.front()->T;
  std::vector<const ParentArray*> graphs;
  std::vector<std::size_t> first_col;
  std::vector<std::size_t> warm;
  std::vector<double> weight;
  std::size_t K = 0;
  for (const TrainingPair* p : batch) {
    if (p->T != T) fail(ErrorCode::kShapeMismatch, "loss_gradient: all pairs in a batch must share T");
    if (p->X.size() != p->T * p->N * kChannels || p->Y.size() != p->T * p->N || p->lambda.size() != p->N)
      fail(ErrorCode::kShapeMismatch, "loss_gradient: malformed training pair");
    graphs.push_back(&p->lambda);
    first_col.push_back(K);
    K += p->N;
    const std::size_t w = warmup_steps(warmup_s, p->F);
    if (w >= T) fail(ErrorCode::kInvalidArgument, "loss_gradient: warm-up consumes the sequence");
    warm.push_back(w);
    weight.push_back(1.0 / (static_cast<double>(batch.size()) * static_cast<double>(p->N) *
                            static_cast<double>(T - w)));
  }
  const auto topo = detail::Topology::from_graphs(graphs);
  const auto H = static_cast<Eigen::Index>(params.hidden());
  const auto cols = static_cast<Eigen::Index>(K);
  const std::size_t seg_len = truncation == 0 ? T : std::min(truncation, T);

  BatchGradient out;
  out.grad = RingParams(params.hidden(), params.message());
  std::vector<detail::StepCache> caches(seg_len);
  std::vector<Eigen::MatrixXd> s1(seg_len + 1), s2(seg_len + 1), dout(seg_len);
  s1[0] = Eigen::MatrixXd::Zero(H, cols);
  s2[0] = Eigen::MatrixXd::Zero(H, cols);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(kChannels), cols);

  for (std::size_t start = 0; start < T; start += seg_len) {
    const std::size_t len = std::min(seg_len, T - start);
    for (std::size_t k = 0; k < len; ++k) {
      const std::size_t t = start + k;
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const TrainingPair& p = *batch[b];
        x.middleCols(static_cast<Eigen::Index>(first_col[b]), static_cast<Eigen::Index>(p.N)) =
            ConstMatrixMap(p.X.data() + t * p.N * kChannels, static_cast<Eigen::Index>(kChannels),
                           static_cast<Eigen::Index>(p.N));
      }
      detail::forward_step(params, topo, s1[k], s2[k], x, caches[k], s1[k + 1], s2[k + 1]);
      if (!s1[k + 1].allFinite() || !s2[k + 1].allFinite())
        fail(ErrorCode::kNonFinite, "loss_gradient: hidden state became non-finite at t=" + std::to_string(t));
      dout[k].setZero(4, cols);
      for (std::size_t b = 0; b < batch.size(); ++b) {
        const TrainingPair& p = *batch[b];
        if (t < warm[b]) continue;
        for (std::size_t i = 0; i < p.N; ++i) {
          const auto j = static_cast<Eigen::Index>(first_col[b] + i);
          const auto o = caches[k].out.col(j);
          const Quat est{o(0), o(1), o(2), o(3)};
          std::array<double, 4> g{};
          out.loss += weight[b] * body_angle_sq(est, p.y(t, i), p.lambda.parents[i] == 0, &g);
          for (int c = 0; c < 4; ++c) dout[k](c, j) = weight[b] * g[static_cast<std::size_t>(c)];
        }
      }
    }
    Eigen::MatrixXd ds1 = Eigen::MatrixXd::Zero(H, cols);
    Eigen::MatrixXd ds2 = Eigen::MatrixXd::Zero(H, cols);
    for (std::size_t k = len; k-- > 0;)
      detail::backward_step(params, topo, s1[k], s2[k], caches[k], dout[k], ds1, ds2, out.grad);
    s1[0] = s1[len];
    s2[0] = s2[len];
  }

  for (const auto& spec : out.grad.layout()) {
    for (std::size_t k = 0; k < spec.rows * spec.cols; ++k) {
      if (!std::isfinite(out.grad.values()[spec.offset + k]))
        fail(ErrorCode::kNonFinite, "loss_gradient: non-finite gradient in block '" + spec.name + "'");
    }
  }
  return out;
}

std::string format_train_record(const TrainRecord& r) {
  nlohmann::json j;
  j["step"] = r.step;
  j["loss"] = r.loss;
  if (r.validation_mae_deg >= 0.0) {
    j["val_mae_deg"] = r.validation_mae_deg;
  } else {
    j["val_mae_deg"] = nullptr;
  }
  j["wall_s"] = r.wall_s;
  return j.dump();
}

TrainResult train(const TrainConfig& config, std::span<const TrainingPair> train_set,
                  std::span<const TrainingPair> validation_set, const TrainCallback& on_record) {
  return train_from(config, init_params(config.hidden, config.message, config.seed), train_set,
                    validation_set, on_record);
}

TrainResult train_from(const TrainConfig& config, RingParams initial,
                       std::span<const TrainingPair> train_set,
                       std::span<const TrainingPair> validation_set, const TrainCallback& on_record) {
  if (config.batch_size == 0) fail(ErrorCode::kInvalidArgument, "train: batch_size must be >= 1");
  TrainResult result;
  result.params = std::move(initial);
  if (config.steps == 0) return result;
  if (train_set.empty()) fail(ErrorCode::kInvalidArgument, "train: empty training set");

  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(derive_seed(config.seed, 0x7261696eULL));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t cursor = 0;

  RingParams& p = result.params;
  std::vector<double> m(p.size(), 0.0), v(p.size(), 0.0);
  std::vector<const TrainingPair*> batch;

  for (std::size_t step = 0; step < config.steps; ++step) {
    batch.clear();
    while (batch.size() < std::min(config.batch_size, train_set.size())) {
      if (cursor == order.size()) {
        std::shuffle(order.begin(), order.end(), rng);
        cursor = 0;
      }
      batch.push_back(&train_set[order[cursor++]]);
    }
    BatchGradient bg;
    try {
      bg = loss_gradient(p, batch, config.warmup_s, config.truncation, config.threads);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonFinite) throw;
      fail(ErrorCode::kDiverged, "train: step " + std::to_string(step + 1) + ": " + e.what());
    }
    if (!std::isfinite(bg.loss))
      fail(ErrorCode::kDiverged, "train: non-finite loss at step " + std::to_string(step + 1));

    auto g = bg.grad.values();
    double norm2 = 0.0;
    for (double x : g) norm2 += x * x;
    const double gnorm = std::sqrt(norm2);
    const double clip = (config.clip_norm > 0.0 && gnorm > config.clip_norm) ? config.clip_norm / gnorm : 1.0;

    double lr = config.learning_rate;
    if (config.cosine_decay)
      lr *= 0.5 * (1.0 + std::cos(kPi * static_cast<double>(step) / static_cast<double>(config.steps)));
    const double t = static_cast<double>(step + 1);
    const double c1 = 1.0 - std::pow(config.beta1, t);
    const double c2 = 1.0 - std::pow(config.beta2, t);
    auto values = p.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double gk = g[k] * clip;
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk;
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * gk * gk;
      values[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config.epsilon);
    }
    if (!p.all_finite())
      fail(ErrorCode::kDiverged, "train: parameters became non-finite at step " + std::to_string(step + 1));

    TrainRecord rec;
    rec.step = step + 1;
    rec.loss = bg.loss;
    const bool last = step + 1 == config.steps;
    if (!validation_set.empty() && config.validation_every > 0 &&
        ((step + 1) % config.validation_every == 0 || last))
      rec.validation_mae_deg = evaluate(p, validation_set, config.validation_exclude_s).mean;
    rec.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(rec);
    if (on_record) on_record(rec);
  }
  return result;
}

}  // namespace ring
