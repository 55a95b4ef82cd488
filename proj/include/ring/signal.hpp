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

// Band-limited resampling of uniformly sampled signals.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ring/quat.hpp"

namespace ring {

// Precomputed weights mapping an input grid (rate_in, n_in samples starting
// at t=0) onto output instants k / rate_out, k < n_out. When rate_out differs
// from rate_in, each output is a windowed-sinc low-pass evaluated at the exact
// output instant with cutoff 0.45 * min(rate_in, rate_out) and a DC gain of
// exactly one. Signal ends are extended by even reflection. Equal rates give
// the identity map.
class Resampler {
 public:
  Resampler(double rate_in, std::size_t n_in, double rate_out, std::size_t n_out);

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<Vec3> apply(std::span<const Vec3> x) const;

  std::size_t size_out() const { return offsets_.size(); }

 private:
  std::size_t n_in_;
  std::vector<std::size_t> offsets_;  // per output: start into weights_/indices_
  std::vector<std::size_t> counts_;
  std::vector<std::size_t> indices_;
  std::vector<double> weights_;
};

// Shortest-arc interpolation of a quaternion sequence onto k / rate_out.
std::vector<Quat> resample_quats(std::span<const Quat> q, double rate_in, double rate_out,
                                 std::size_t n_out);

// Linear interpolation of a scalar sequence at fractional sample index.
double interp_linear(std::span<const double> x, double index);

}  // namespace ring
