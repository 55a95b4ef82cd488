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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracle.hpp"
#include "ring/error.hpp"
#include "ring/signal.hpp"

using namespace ring;

namespace {

std::vector<double> sinusoid(double f, double rate, std::size_t n, double phase = 0.3) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = std::sin(2 * kPi * f * static_cast<double>(k) / rate + phase);
  return x;
}

double rms(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t k = lo; k < hi; ++k) s += x[k] * x[k];
  return std::sqrt(s / static_cast<double>(hi - lo));
}

}  // namespace

TEST_CASE("equal rates give the identity map") {
  oracle::Random rnd(31);
  std::vector<double> x(257);
  for (double& v : x) v = rnd.normal();
  const Resampler r(100.0, x.size(), 100.0, x.size());
  CHECK(r.apply(x) == x);
}

TEST_CASE("constant signals pass with unit gain") {
  const std::vector<double> x(300, 2.5);
  for (double out_rate : {40.0, 77.0, 250.0}) {
    const auto n_out = static_cast<std::size_t>(std::llround(300 * out_rate / 100.0));
    const auto y = Resampler(100.0, x.size(), out_rate, n_out).apply(x);
    REQUIRE(y.size() == n_out);
    for (double v : y) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("zero signals stay exactly zero") {
  const std::vector<double> x(300, 0.0);
  for (double v : Resampler(1000.0, x.size(), 60.0, 18).apply(x)) CHECK(v == 0.0);
}

TEST_CASE("100 -> 200 -> 100 Hz roundtrip of a 2 Hz sinusoid") {
  const std::size_t n = 1000;
  const auto x = sinusoid(2.0, 100.0, n);
  const auto up = Resampler(100.0, n, 200.0, 2 * n).apply(x);
  const auto back = Resampler(200.0, 2 * n, 100.0, n).apply(up);
  std::vector<double> err(n);
  for (std::size_t k = 0; k < n; ++k) err[k] = back[k] - x[k];
  CHECK(rms(err, 0, n) <= 0.01 * rms(x, 0, n));
  // The upsampled signal matches the analytic one at the new instants.
  const auto truth = sinusoid(2.0, 200.0, 2 * n);
  std::vector<double> e2(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) e2[k] = up[k] - truth[k];
  CHECK(rms(e2, 0, 2 * n) <= 0.01);
}

TEST_CASE("downsampling suppresses content above the new band") {
  // 40 Hz tone sampled at 1000 Hz, decimated to 50 Hz (Nyquist 25 Hz).
  const std::size_t n = 5000;
  const auto x = sinusoid(40.0, 1000.0, n);
  const auto y = Resampler(1000.0, n, 50.0, 250).apply(x);
  CHECK(rms(y, 20, 230) < 0.01);
  // In-band content passes.
  const auto lo = Resampler(1000.0, n, 50.0, 250).apply(sinusoid(3.0, 1000.0, n));
  CHECK(rms(lo, 20, 230) == doctest::Approx(std::sqrt(0.5)).epsilon(0.01));
}

TEST_CASE("Vec3 overload filters each component") {
  const std::size_t n = 400;
  const auto a = sinusoid(1.0, 100.0, n), b = sinusoid(2.0, 100.0, n, 1.0);
  std::vector<Vec3> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = {a[k], b[k], 1.0};
  const Resampler r(100.0, n, 60.0, 240);
  const auto out = r.apply(v);
  const auto ra = r.apply(a), rb = r.apply(b);
  for (std::size_t k = 0; k < out.size(); ++k) {
    CHECK(out[k].x == ra[k]);
    CHECK(out[k].y == rb[k]);
    CHECK(out[k].z == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(r.apply(std::vector<double>(n + 1)), Error);
}

TEST_CASE("resample_quats") {
  std::vector<Quat> q(101);
  for (std::size_t k = 0; k < q.size(); ++k) q[k] = quat_from_axis_angle({0, 0, 1}, 0.01 * static_cast<double>(k));
  // Flip signs on alternate samples; interpolation must still follow the short arc.
  for (std::size_t k = 1; k < q.size(); k += 2) q[k] = -q[k];
  const auto out = resample_quats(q, 100.0, 250.0, 250);
  REQUIRE(out.size() == 250);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = static_cast<double>(k) / 250.0;
    CHECK(std::abs(out[k].norm() - 1.0) < 1e-12);
    CHECK(quat_angle_rad(out[k], quat_from_axis_angle({0, 0, 1}, std::min(t, 1.0))) < 1e-9);
  }
  CHECK(resample_quats(q, 100.0, 100.0, q.size()) == q);
}

TEST_CASE("interp_linear") {
  const std::vector<double> x{0.0, 1.0, 4.0};
  CHECK(interp_linear(x, 0.5) == 0.5);
  CHECK(interp_linear(x, 1.25) == 1.75);
  CHECK(interp_linear(x, 2.0) == 4.0);
  CHECK(interp_linear(x, 5.0) == 4.0);
  CHECK(interp_linear(x, -1.0) == 0.0);
}
