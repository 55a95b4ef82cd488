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
#include <limits>
#include <vector>

#include "doctest.h"
#include "nlohmann/json.hpp"
#include "oracle.hpp"
#include "ring/error.hpp"
#include "ring/eval.hpp"
#include "ring/training.hpp"

using namespace ring;

namespace {

std::vector<Quat> random_quats(oracle::Random& rnd, std::size_t n) {
  std::vector<Quat> q(n);
  for (auto& v : q) v = rnd.quat();
  return q;
}

std::vector<TrainingPair> tiny_set(std::size_t count, std::size_t T, double F, std::uint64_t seed,
                                   ParentArray lambda = ParentArray::chain(3)) {
  GeneratorOptions o;
  o.timesteps = T;
  o.rate_set = {F};
  o.lambda = std::move(lambda);
  return generate_batch(seed, count, o);
}

// Mean per-sequence loss computed through the forward pass only.
double forward_loss(const RingParams& p, const std::vector<const TrainingPair*>& batch, double warmup_s) {
  double sum = 0.0;
  for (const TrainingPair* pair : batch) {
    const auto Y = ring_apply(*pair, p);
    sum += orientation_loss(Y, pair->Y, pair->T, pair->lambda, warmup_steps(warmup_s, pair->F));
  }
  return sum / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("orientation_loss closed-form examples") {
  oracle::Random rnd(61);
  const auto lambda = ParentArray::chain(3);
  const std::size_t T = 12;
  const auto Y = random_quats(rnd, T * 3);
  CHECK(orientation_loss(Y, Y, T, lambda, 2) == 0.0);
  std::vector<Quat> neg(Y.size());
  for (std::size_t k = 0; k < Y.size(); ++k) neg[k] = -Y[k];
  CHECK(orientation_loss(neg, Y, T, lambda, 2) == 0.0);

  // Body 2 off by 10 degrees everywhere.
  auto est = Y;
  for (std::size_t t = 0; t < T; ++t) est[t * 3 + 1] = quat_mul(Y[t * 3 + 1], oracle::q_axis_deg(rnd.unit(), 10.0));
  const double expected = std::pow(10.0 * kPi / 180.0, 2) / 3.0;
  CHECK(orientation_loss(est, Y, T, lambda, 2) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(orientation_loss(est, Y, T, lambda, 2) == doctest::Approx(0.010154).epsilon(1e-4));

  CHECK_THROWS_AS(orientation_loss(est, Y, T, lambda, T), Error);
  CHECK_THROWS_AS(orientation_loss(est, Y, T - 1, lambda, 0), Error);
}

TEST_CASE("orientation_loss invariances") {
  oracle::Random rnd(62);
  const ParentArray lambda{{0, 1, 1}};
  const std::size_t T = 20;
  const auto Y = random_quats(rnd, T * 3);
  const auto est = random_quats(rnd, T * 3);
  const double base = orientation_loss(est, Y, T, lambda, 0);
  CHECK(base > 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    auto e2 = est, y2 = Y;
    for (auto& q : e2)
      if (rnd.uniform(0, 1) < 0.5) q = -q;
    for (auto& q : y2)
      if (rnd.uniform(0, 1) < 0.5) q = -q;
    CHECK(std::abs(orientation_loss(e2, y2, T, lambda, 0) - base) < 1e-12);
    // Heading of the root target is unobservable.
    auto y3 = Y;
    const Quat heading = quat_from_axis_angle({0, 0, 1}, rnd.uniform(-kPi, kPi));
    for (std::size_t t = 0; t < T; ++t) y3[t * 3] = quat_mul(heading, y3[t * 3]);
    CHECK(std::abs(orientation_loss(est, y3, T, lambda, 0) - base) < 1e-9);
  }
}

TEST_CASE("orientation_loss_gradient matches finite differences on the sphere") {
  oracle::Random rnd(63);
  const auto lambda = ParentArray::chain(3);
  const std::size_t T = 4;
  const auto Y = random_quats(rnd, T * 3);
  const auto est = random_quats(rnd, T * 3);
  const LossGradient g = orientation_loss_gradient(est, Y, T, lambda, 1);
  CHECK(g.loss == doctest::Approx(orientation_loss(est, Y, T, lambda, 1)).epsilon(1e-12));
  const double eps = 1e-6;
  for (std::size_t k = 0; k < est.size(); ++k) {
    std::array<double, 4> fd{};
    for (int c = 0; c < 4; ++c) {
      auto plus = est, minus = est;
      double* pp = &plus[k].w;
      double* pm = &minus[k].w;
      pp[c] += eps;
      pm[c] -= eps;
      plus[k] = plus[k].normalized();
      minus[k] = minus[k].normalized();
      fd[static_cast<std::size_t>(c)] =
          (orientation_loss(plus, Y, T, lambda, 1) - orientation_loss(minus, Y, T, lambda, 1)) / (2 * eps);
    }
    for (int c = 0; c < 4; ++c)
      CHECK(std::abs(fd[static_cast<std::size_t>(c)] - g.d_estimate[k][static_cast<std::size_t>(c)]) < 1e-6);
    if (k < 3) {
      // Warm-up entries carry no gradient.
      for (double v : g.d_estimate[k]) CHECK(v == 0.0);
    }
  }
  // Zero at the minimum.
  const LossGradient at_min = orientation_loss_gradient(Y, Y, T, lambda, 0);
  for (const auto& d : at_min.d_estimate)
    for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("warmup_steps") {
  CHECK(warmup_steps(5.0, 100.0) == 500);
  CHECK(warmup_steps(5.0, 40.0) == 200);
  CHECK(warmup_steps(1.0, 60.0) == 60);
  CHECK(warmup_steps(0.0, 60.0) == 0);
  CHECK(warmup_steps(0.015, 100.0) == 2);
}

TEST_CASE("loss_gradient agrees with central differences on a tiny net") {
  const auto pairs = tiny_set(2, 5, 100.0, 64);
  const std::vector<const TrainingPair*> batch{&pairs[0], &pairs[1]};
  RingParams p = init_params(8, 4, 65);
  oracle::Random rnd(66);
  for (double& v : p.values()) v += 0.05 * rnd.normal();
  const double warmup_s = 0.01;
  const BatchGradient g = loss_gradient(p, batch, warmup_s);
  CHECK(g.loss == doctest::Approx(forward_loss(p, batch, warmup_s)).epsilon(1e-12));
  const double eps = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = static_cast<std::size_t>(rnd.integer(0, static_cast<int>(p.size()) - 1));
    RingParams plus = p, minus = p;
    plus.values()[k] += eps;
    minus.values()[k] -= eps;
    const double fd = (forward_loss(plus, batch, warmup_s) - forward_loss(minus, batch, warmup_s)) / (2 * eps);
    const double an = g.grad.values()[k];
    const double rel = std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-6});
    worst = std::max(worst, rel);
  }
  MESSAGE("worst relative error " << worst);
  CHECK(worst < 1e-4);
}

TEST_CASE("loss_gradient options") {
  const auto pairs = tiny_set(4, 30, 100.0, 67);
  const std::vector<const TrainingPair*> batch{&pairs[0], &pairs[1], &pairs[2], &pairs[3]};
  const RingParams p = init_params(6, 3, 68);
  const BatchGradient full = loss_gradient(p, batch, 0.05);
  SUBCASE("determinism") {
    const BatchGradient again = loss_gradient(p, batch, 0.05);
    CHECK(again.loss == full.loss);
    CHECK(again.grad == full.grad);
  }
  SUBCASE("truncation as long as the sequence is full backprop") {
    const BatchGradient t = loss_gradient(p, batch, 0.05, 30);
    CHECK(t.loss == full.loss);
    CHECK(t.grad == full.grad);
  }
  SUBCASE("short truncation keeps the loss and changes the gradient") {
    const BatchGradient t = loss_gradient(p, batch, 0.05, 7);
    CHECK(t.loss == doctest::Approx(full.loss).epsilon(1e-12));
    CHECK(!(t.grad == full.grad));
  }
  SUBCASE("sharded evaluation") {
    const BatchGradient t = loss_gradient(p, batch, 0.05, 0, 3);
    CHECK(t.loss == doctest::Approx(full.loss).epsilon(1e-12));
    for (std::size_t k = 0; k < p.size(); ++k)
      CHECK(t.grad.values()[k] == doctest::Approx(full.grad.values()[k]).epsilon(1e-9).scale(1e-12));
  }
  SUBCASE("mixed graphs share a batch") {
    const auto other = tiny_set(1, 30, 60.0, 69, ParentArray{{0, 1, 1, 2}});
    const std::vector<const TrainingPair*> mixed{&pairs[0], &other[0]};
    const BatchGradient m = loss_gradient(p, mixed, 0.05);
    CHECK(m.loss == doctest::Approx(forward_loss(p, mixed, 0.05)).epsilon(1e-12));
  }
  SUBCASE("errors") {
    const auto longer = tiny_set(1, 31, 100.0, 70);
    const std::vector<const TrainingPair*> bad{&pairs[0], &longer[0]};
    CHECK_THROWS_AS(loss_gradient(p, bad, 0.05), Error);
    CHECK_THROWS_AS(loss_gradient(p, std::vector<const TrainingPair*>{}, 0.05), Error);
    CHECK_THROWS_AS(loss_gradient(p, batch, 1.0), Error);
    RingParams broken = p;
    broken.values()[0] = std::nan("");
    try {
      loss_gradient(broken, batch, 0.05);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kNonFinite);
    }
  }
}

TEST_CASE("train") {
  const auto train_set = tiny_set(8, 40, 100.0, 71);
  const auto val = tiny_set(2, 40, 100.0, 72);
  TrainConfig c;
  c.hidden = 8;
  c.message = 4;
  c.batch_size = 4;
  c.steps = 0;
  c.warmup_s = 0.1;
  c.seed = 3;

  SUBCASE("zero steps returns the initial parameters") {
    const TrainResult r = train(c, train_set);
    CHECK(r.params == init_params(8, 4, 3));
    CHECK(r.log.empty());
  }
  SUBCASE("deterministic and decreasing") {
    c.steps = 60;
    c.learning_rate = 1e-2;
    c.validation_every = 20;
    c.validation_exclude_s = 0.1;
    std::vector<TrainRecord> seen;
    const TrainResult a = train(c, train_set, val, [&](const TrainRecord& r) { seen.push_back(r); });
    const TrainResult b = train(c, train_set, val);
    CHECK(a.params == b.params);
    REQUIRE(a.log.size() == 60);
    CHECK(seen.size() == 60);
    for (std::size_t k = 0; k < a.log.size(); ++k) {
      CHECK(a.log[k].step == k + 1);
      CHECK(a.log[k].loss == b.log[k].loss);
      const bool validated = (k + 1) % 20 == 0;
      CHECK((a.log[k].validation_mae_deg >= 0.0) == validated);
    }
    double first = 0.0, last = 0.0;
    for (std::size_t k = 0; k < 10; ++k) first += a.log[k].loss;
    for (std::size_t k = 50; k < 60; ++k) last += a.log[k].loss;
    CHECK(last < first);
    c.seed = 4;
    CHECK(!(train(c, train_set).params == a.params));
  }
  SUBCASE("divergence is reported") {
    c.steps = 5;
    c.learning_rate = std::numeric_limits<double>::infinity();
    c.clip_norm = 0.0;
    try {
      train(c, train_set);
      FAIL("expected divergence");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kDiverged);
    }
  }
  SUBCASE("invalid configuration") {
    c.steps = 1;
    c.batch_size = 0;
    CHECK_THROWS_AS(train(c, train_set), Error);
    c.batch_size = 2;
    CHECK_THROWS_AS(train(c, std::span<const TrainingPair>{}), Error);
  }
}

TEST_CASE("train log records are JSON lines") {
  TrainRecord r;
  r.step = 3;
  r.loss = 0.25;
  r.wall_s = 1.5;
  auto j = nlohmann::json::parse(format_train_record(r));
  CHECK(j["step"] == 3);
  CHECK(j["loss"] == 0.25);
  CHECK(j["val_mae_deg"].is_null());
  CHECK(j["wall_s"] == 1.5);
  r.validation_mae_deg = 12.5;
  j = nlohmann::json::parse(format_train_record(r));
  CHECK(j["val_mae_deg"] == 12.5);
  CHECK(format_train_record(r).find('\n') == std::string::npos);
}
