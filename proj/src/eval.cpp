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

#include "ring/eval.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "ring/error.hpp"
#include "ring/signal.hpp"

namespace ring {

Quat inclination(const Quat& q) { return heading_decompose(q, kWorldUp).inclination; }

double body_angle_rad(const Quat& estimate, const Quat& truth, bool attached_to_earth) {
  if (attached_to_earth) return quat_angle_rad(inclination(estimate), inclination(truth));
  return quat_angle_rad(estimate, truth);
}

MaeResult mae_deg(std::span<const Quat> estimate, std::span<const Quat> truth, std::size_t T,
                  const ParentArray& lambda, double F, double exclude_s) {
  const std::size_t N = lambda.size();
  if (estimate.size() != T * N || truth.size() != T * N)
    fail(ErrorCode::kShapeMismatch, "mae_deg: sequences must be T x N");
  if (!(F > 0.0) || exclude_s < 0.0) fail(ErrorCode::kInvalidArgument, "mae_deg: bad rate or exclusion");
  const auto first = static_cast<std::size_t>(std::ceil(exclude_s * F - 1e-9));
  if (first >= T)
    fail(ErrorCode::kInvalidArgument, "mae_deg: empty window, exclusion of " + std::to_string(exclude_s) +
                                          " s consumes all " + std::to_string(T) + " steps");
  MaeResult r;
  r.first_step = first;
  r.per_body_deg.assign(N, 0.0);
  for (std::size_t t = first; t < T; ++t)
    for (std::size_t i = 0; i < N; ++i)
      r.per_body_deg[i] += body_angle_rad(estimate[t * N + i], truth[t * N + i], lambda.parents[i] == 0);
  const double count = static_cast<double>(T - first);
  double total = 0.0;
  for (double& b : r.per_body_deg) {
    b = b / count * kDegPerRad;
    total += b;
  }
  r.mean_deg = total / static_cast<double>(N);
  return r;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  for (double v : values) s.std += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(s.std / static_cast<double>(values.size()));
  return s;
}

TrainingPair resample(const TrainingPair& pair, double F_new) {
  if (!(F_new > 0.0)) fail(ErrorCode::kInvalidArgument, "resample: rate must be positive");
  const auto T_new = static_cast<std::size_t>(std::llround(static_cast<double>(pair.T) * F_new / pair.F));
  if (T_new == 0) fail(ErrorCode::kInvalidArgument, "resample: no samples at the new rate");
  TrainingPair out;
  out.T = T_new;
  out.N = pair.N;
  out.F = F_new;
  out.lambda = pair.lambda;
  out.X.assign(T_new * pair.N * kChannels, 0.0);
  out.Y.resize(T_new * pair.N);
  const Resampler rs(pair.F, pair.T, F_new, T_new);
  std::vector<double> channel(pair.T);
  std::vector<Quat> track(pair.T);
  for (std::size_t i = 0; i < pair.N; ++i) {
    for (std::size_t c = 0; c < kInverseRateChannel; ++c) {
      bool all_zero = true;
      for (std::size_t t = 0; t < pair.T; ++t) {
        channel[t] = pair.x(t, i, c);
        all_zero = all_zero && channel[t] == 0.0;
      }
      if (all_zero) continue;  // dropped channels stay exactly zero
      const auto res = rs.apply(std::span<const double>(channel));
      for (std::size_t t = 0; t < T_new; ++t) out.x(t, i, c) = res[t];
    }
    for (std::size_t t = 0; t < T_new; ++t) out.x(t, i, kInverseRateChannel) = 1.0 / F_new;
    for (std::size_t t = 0; t < pair.T; ++t) track[t] = pair.y(t, i);
    const auto q = resample_quats(track, pair.F, F_new, T_new);
    for (std::size_t t = 0; t < T_new; ++t) out.y(t, i) = q[t];
  }
  return out;
}

std::vector<Quat> dead_reckoning(const TrainingPair& pair) {
  const std::size_t N = pair.N, T = pair.T;
  std::vector<bool> has_imu(N, false);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t t = 0; t < T && !has_imu[i]; ++t)
      for (std::size_t c = 0; c < 6; ++c)
        if (pair.x(t, i, c) != 0.0) has_imu[i] = true;

  const double dt = 1.0 / pair.F;
  std::vector<Quat> world(N, Quat::identity());
  std::vector<Quat> out(T * N, Quat::identity());
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < N; ++i) {
      const int p = pair.lambda.parents[i];
      if (!has_imu[i]) continue;
      if (p == 0) {
        out[t * N + i] = world[i];
      } else if (has_imu[static_cast<std::size_t>(p - 1)]) {
        out[t * N + i] = quat_mul(world[static_cast<std::size_t>(p - 1)].conj(), world[i]);
      }
    }
    for (std::size_t i = 0; i < N; ++i)
      if (has_imu[i])
        world[i] = quat_integrate(world[i], {pair.x(t, i, 0), pair.x(t, i, 1), pair.x(t, i, 2)}, dt);
  }
  return out;
}

std::vector<Quat> identity_prediction(const TrainingPair& pair) {
  return std::vector<Quat>(pair.T * pair.N, Quat::identity());
}

Summary evaluate(const RingParams& params, std::span<const TrainingPair> pairs, double exclude_s) {
  std::vector<double> maes;
  maes.reserve(pairs.size());
  for (const auto& p : pairs) {
    const auto est = ring_apply(p, params);
    maes.push_back(mae_deg(est, p.Y, p.T, p.lambda, p.F, exclude_s).mean_deg);
  }
  return summarize(maes);
}

std::vector<SweepRow> rate_sweep(const RingParams& params, std::span<const TrainingPair> pairs,
                                 std::span<const double> rates, double exclude_s) {
  std::vector<SweepRow> rows;
  for (double F : rates) {
    std::vector<TrainingPair> resampled;
    resampled.reserve(pairs.size());
    for (const auto& p : pairs) resampled.push_back(resample(p, F));
    rows.push_back({F, evaluate(params, resampled, exclude_s)});
  }
  return rows;
}

std::vector<AblationFlags> ablation_flag_grid() {
  std::vector<AblationFlags> grid;
  for (int nonrigid = 0; nonrigid < 2; ++nonrigid)
    for (int misaligned = 0; misaligned < 2; ++misaligned)
      for (int sparse = 0; sparse < 2; ++sparse)
        grid.push_back({nonrigid == 1, misaligned == 1, sparse == 1});
  return grid;
}

std::vector<AblationRow> ablation_grid(const RingParams& params, const GeneratorOptions& base,
                                       std::span<const std::uint64_t> seeds, double F,
                                       double exclude_s) {
  std::vector<AblationRow> rows;
  for (const auto& flags : ablation_flag_grid()) {
    GeneratorOptions o = base;
    o.flags = flags;
    std::vector<TrainingPair> test;
    for (std::uint64_t s : seeds) test.push_back(generate_sequence(s, F, o).pair);
    rows.push_back({flags, evaluate(params, test, exclude_s)});
  }
  return rows;
}

std::string format_sweep_table(std::span<const SweepRow> rows, char d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "rate_hz" << d << "mae_deg" << d << "std_deg" << d << "trials\n";
  for (const auto& r : rows) os << r.rate << d << r.mae.mean << d << r.mae.std << d << r.mae.count << '\n';
  return os.str();
}

std::string format_ablation_table(std::span<const AblationRow> rows, char d) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << "nonrigid" << d << "misaligned" << d << "sparse" << d << "mae_deg" << d << "std_deg\n";
  for (const auto& r : rows)
    os << (r.flags.nonrigid ? 1 : 0) << d << (r.flags.misaligned ? 1 : 0) << d << (r.flags.sparse ? 1 : 0)
       << d << r.mae.mean << d << r.mae.std << '\n';
  return os.str();
}

}  // namespace ring
