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

#include "ring/signal.hpp"

#include <algorithm>
#include <cmath>

#include "ring/error.hpp"

namespace ring {
namespace {

// Kernel half width in units of the cutoff period.
constexpr double kLobes = 4.0;

std::size_t reflect(long long i, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * static_cast<long long>(n) - 2;
  i %= period;
  if (i < 0) i += period;
  if (i >= static_cast<long long>(n)) i = period - i;
  return static_cast<std::size_t>(i);
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

Resampler::Resampler(double rate_in, std::size_t n_in, double rate_out, std::size_t n_out)
    : n_in_(n_in) {
  if (!(rate_in > 0.0) || !(rate_out > 0.0))
    fail(ErrorCode::kInvalidArgument, "resampler: rates must be positive");
  if (n_in == 0) fail(ErrorCode::kInvalidArgument, "resampler: empty input");
  offsets_.resize(n_out);
  counts_.resize(n_out);
  if (rate_in == rate_out) {
    for (std::size_t k = 0; k < n_out; ++k) {
      offsets_[k] = k;
      counts_[k] = 1;
      indices_.push_back(std::min(k, n_in - 1));
      weights_.push_back(1.0);
    }
    return;
  }
  const double cutoff = 0.45 * std::min(rate_in, rate_out);  // Hz
  const double half_width = kLobes / cutoff;                 // s
  const double fc = 2.0 * cutoff;                            // sinc argument scale
  for (std::size_t k = 0; k < n_out; ++k) {
    const double t = static_cast<double>(k) / rate_out;
    const double center = t * rate_in;
    const auto lo = static_cast<long long>(std::ceil((t - half_width) * rate_in));
    const auto hi = static_cast<long long>(std::floor((t + half_width) * rate_in));
    offsets_[k] = weights_.size();
    double sum = 0.0;
    for (long long j = lo; j <= hi; ++j) {
      const double dt = (static_cast<double>(j) - center) / rate_in;
      const double window = 0.54 + 0.46 * std::cos(kPi * dt / half_width);
      const double w = sinc(fc * dt) * window;
      indices_.push_back(reflect(j, n_in));
      weights_.push_back(w);
      sum += w;
    }
    counts_[k] = weights_.size() - offsets_[k];
    for (std::size_t m = offsets_[k]; m < weights_.size(); ++m) weights_[m] /= sum;
  }
}

std::vector<double> Resampler::apply(std::span<const double> x) const {
  if (x.size() != n_in_) fail(ErrorCode::kInvalidArgument, "resampler: input length mismatch");
  std::vector<double> out(offsets_.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t m = offsets_[k]; m < offsets_[k] + counts_[k]; ++m) acc += weights_[m] * x[indices_[m]];
    out[k] = acc;
  }
  return out;
}

std::vector<Vec3> Resampler::apply(std::span<const Vec3> x) const {
  if (x.size() != n_in_) fail(ErrorCode::kInvalidArgument, "resampler: input length mismatch");
  std::vector<Vec3> out(offsets_.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    Vec3 acc;
    for (std::size_t m = offsets_[k]; m < offsets_[k] + counts_[k]; ++m) acc += x[indices_[m]] * weights_[m];
    out[k] = acc;
  }
  return out;
}

std::vector<Quat> resample_quats(std::span<const Quat> q, double rate_in, double rate_out,
                                 std::size_t n_out) {
  if (q.empty()) fail(ErrorCode::kInvalidArgument, "resample_quats: empty input");
  std::vector<Quat> out(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    if (rate_in == rate_out && k < q.size()) {
      out[k] = q[k];
      continue;
    }
    const double pos = static_cast<double>(k) * rate_in / rate_out;
    const auto i0 = std::min(static_cast<std::size_t>(pos), q.size() - 1);
    const std::size_t i1 = std::min(i0 + 1, q.size() - 1);
    out[k] = slerp(q[i0], q[i1], std::clamp(pos - static_cast<double>(i0), 0.0, 1.0));
  }
  return out;
}

double interp_linear(std::span<const double> x, double index) {
  if (index <= 0.0) return x.front();
  const auto i0 = static_cast<std::size_t>(index);
  if (i0 + 1 >= x.size()) return x.back();
  const double u = index - static_cast<double>(i0);
  return x[i0] + u * (x[i0 + 1] - x[i0]);
}

}  // namespace ring
