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

// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ring/ring_c.h"

namespace {

enum Exit : int {
  kOk = 0,
  kOther = 1,
  kUsage = 2,
  kIoError = 3,
  kDivergence = 4,
  kIncompatible = 5,
};

struct Failure {
  int code;
  std::string message;
};

int exit_code_for(ring_status s) {
  switch (s) {
    case RING_OK: return kOk;
    case RING_ERR_INVALID_ARGUMENT: return kUsage;
    case RING_ERR_IO:
    case RING_ERR_FORMAT:
    case RING_ERR_CHECKSUM:
    case RING_ERR_INVARIANT: return kIoError;
    case RING_ERR_DIVERGED:
    case RING_ERR_NON_FINITE: return kDivergence;
    case RING_ERR_SHAPE_MISMATCH: return kIncompatible;
    default: return kOther;
  }
}

void check(ring_status s) {
  if (s != RING_OK) throw Failure{exit_code_for(s), std::string(ring_status_name(s)) + ": " + ring_last_error()};
}

struct DatasetDeleter {
  void operator()(ring_dataset* d) const { ring_dataset_free(d); }
};
struct ModelDeleter {
  void operator()(ring_model* m) const { ring_model_free(m); }
};
struct StepperDeleter {
  void operator()(ring_stepper* s) const { ring_stepper_free(s); }
};
using Dataset = std::unique_ptr<ring_dataset, DatasetDeleter>;
using Model = std::unique_ptr<ring_model, ModelDeleter>;
using Stepper = std::unique_ptr<ring_stepper, StepperDeleter>;

Dataset load_dataset(const std::string& path) {
  ring_dataset* d = nullptr;
  check(ring_dataset_read(path.c_str(), &d));
  return Dataset(d);
}

Model load_model(const std::string& path, std::size_t H, std::size_t M) {
  ring_model* m = nullptr;
  check(ring_model_read(path.c_str(), H, M, &m));
  return Model(m);
}

std::size_t thread_count() {
  const char* env = std::getenv("RING_NUM_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(env, &end, 10);
  if (*end != '\0' || n == 0) throw Failure{kUsage, "RING_NUM_THREADS must be a positive integer"};
  return n;
}

// "40..200 step 20", "40..200" (step 20), or a list "40,100 200".
std::vector<double> parse_rates(const std::vector<std::string>& tokens) {
  std::string text;
  for (const auto& t : tokens) text += t + " ";
  std::replace(text.begin(), text.end(), ',', ' ');
  std::vector<double> rates;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      std::istringstream rest(text.substr(dots + 2));
      const double lo = std::stod(text.substr(0, dots));
      double hi = 0.0, step = 20.0;
      std::string word;
      if (!(rest >> hi)) throw std::invalid_argument("range end");
      if (rest >> word) {
        if (word != "step" || !(rest >> step)) throw std::invalid_argument("step");
      }
      if (rest >> word) throw std::invalid_argument("trailing text");
      if (!(step > 0.0) || !(lo > 0.0) || hi < lo) throw std::invalid_argument("range");
      for (double r = lo; r <= hi + 1e-9 * hi; r += step) rates.push_back(r);
    } else {
      std::istringstream in(text);
      std::string word;
      while (in >> word) {
        std::size_t used = 0;
        const double r = std::stod(word, &used);
        if (used != word.size() || !(r > 0.0)) throw std::invalid_argument(word);
        rates.push_back(r);
      }
    }
  } catch (const std::exception&) {
    throw Failure{kUsage, "cannot parse rates '" + text + "'; expected e.g. '40..200 step 20' or '50,100'"};
  }
  if (rates.empty()) throw Failure{kUsage, "rate set is empty"};
  return rates;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

void print_mae_row(const std::string& label, const ring_mae& m) {
  std::cout << label << "  " << fmt("%8.3f +- %7.3f deg", m.mean_deg, m.std_deg) << "  (n=" << m.trials
            << ")\n";
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::uint64_t seed = 0;
  std::size_t count = 512;
  std::size_t timesteps = 6000;
  std::size_t bodies = 3;
  std::vector<std::string> rates{"40..200", "step", "20"};
  std::vector<std::string> flags;
  bool no_noise = false;
  std::string config;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  ring_generate_options o;
  ring_generate_options_default(&o);
  const auto rates = parse_rates(a.rates);
  std::set<std::string> seen;
  for (const auto& raw : a.flags) {
    std::stringstream ss(raw);
    std::string f;
    while (std::getline(ss, f, ',')) {
      if (f.empty()) continue;
      if (!seen.insert(f).second) throw Failure{kUsage, "flag '" + f + "' given twice"};
      if (f == "nonrigid") o.nonrigid = 1;
      else if (f == "misaligned") o.misaligned = 1;
      else if (f == "sparse") o.sparse = 1;
      else throw Failure{kUsage, "unknown flag '" + f + "' (expected nonrigid, misaligned or sparse)"};
    }
  }
  if (o.sparse && a.bodies < 3)
    throw Failure{kUsage, "sparse needs at least 3 bodies so that some body has no IMU"};
  o.seed = a.seed;
  o.count = a.count;
  o.timesteps = a.timesteps;
  o.rates = rates.data();
  o.rate_count = rates.size();
  o.bodies = a.bodies;
  o.imu_noise = a.no_noise ? 0 : 1;
  o.ranges_path = a.config.empty() ? nullptr : a.config.c_str();
  o.threads = thread_count();

  ring_dataset* raw = nullptr;
  check(ring_dataset_generate(&o, &raw));
  Dataset d(raw);
  check(ring_dataset_write(d.get(), a.out.c_str()));

  std::map<double, std::size_t> histogram;
  for (std::size_t k = 0; k < ring_dataset_count(d.get()); ++k) {
    double F = 0.0;
    check(ring_dataset_info(d.get(), k, nullptr, nullptr, &F));
    ++histogram[F];
  }
  std::cout << "wrote " << a.out << "\n"
            << "count      " << a.count << "\n"
            << "timesteps  " << a.timesteps << "\n"
            << "bodies     " << a.bodies << "\n"
            << "flags      nonrigid=" << o.nonrigid << " misaligned=" << o.misaligned
            << " sparse=" << o.sparse << " noise=" << o.imu_noise << "\n"
            << "rates (Hz)\n";
  for (double r : rates) std::cout << "  " << fmt("%6.1f  %zu", r, histogram[r]) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::string validation;
  std::size_t hidden = 32;
  std::size_t message = 16;
  std::size_t steps = 1000;
  std::size_t batch = 32;
  double lr = 3e-4;
  bool no_cosine = false;
  double clip = 1.0;
  double warmup = 5.0;
  std::size_t truncation = 0;
  std::size_t validation_every = 0;
  double exclude = 5.0;
  std::uint64_t seed = 0;
  std::string out_weights;
  std::string log;
  bool quiet = false;
};

struct LogSink {
  std::ofstream file;
  bool quiet = false;
  std::size_t steps = 0;
};

void on_train_record(std::size_t step, double loss, double val, double wall, void* user) {
  auto* sink = static_cast<LogSink*>(user);
  nlohmann::json j;
  j["step"] = step;
  j["loss"] = loss;
  if (val >= 0.0) j["val_mae_deg"] = val;
  else j["val_mae_deg"] = nullptr;
  j["wall_s"] = wall;
  sink->file << j.dump() << "\n";
  const std::size_t every = std::max<std::size_t>(1, sink->steps / 20);
  if (!sink->quiet && (step % every == 0 || step == sink->steps || val >= 0.0)) {
    std::cout << "step " << step << "/" << sink->steps << "  loss " << fmt("%.6f (%.1f s)", loss, wall);
    if (val >= 0.0) std::cout << "  val " << fmt("%.3f deg", val);
    std::cout << "\n" << std::flush;
  }
}

int run_train(const TrainArgs& a) {
  Dataset train = load_dataset(a.data);
  Dataset validation;
  if (!a.validation.empty()) validation = load_dataset(a.validation);

  ring_train_options o;
  ring_train_options_default(&o);
  o.hidden = a.hidden;
  o.message = a.message;
  o.steps = a.steps;
  o.batch_size = a.batch;
  o.learning_rate = a.lr;
  o.cosine_decay = a.no_cosine ? 0 : 1;
  o.clip_norm = a.clip;
  o.warmup_s = a.warmup;
  o.truncation = a.truncation;
  o.validation_every = a.validation_every;
  o.validation_exclude_s = a.exclude;
  o.seed = a.seed;
  o.threads = thread_count();

  LogSink sink;
  sink.quiet = a.quiet;
  sink.steps = a.steps;
  const std::string log_path = a.log.empty() ? a.out_weights + ".log.jsonl" : a.log;
  sink.file.open(log_path, std::ios::binary | std::ios::trunc);
  if (!sink.file) throw Failure{kIoError, "cannot open log file " + log_path};

  ring_model* raw = nullptr;
  check(ring_train(&o, train.get(), validation.get(), on_train_record, &sink, &raw));
  Model model(raw);
  check(ring_model_write(model.get(), a.out_weights.c_str()));
  sink.file.close();
  if (!sink.file) throw Failure{kIoError, "failed writing log file " + log_path};
  std::size_t count = 0;
  check(ring_model_dims(model.get(), nullptr, nullptr, &count));
  std::cout << "wrote " << a.out_weights << " (H=" << a.hidden << ", M=" << a.message << ", " << count
            << " parameters)\nlog " << log_path << "\n";
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string data;
  std::string weights;
  std::size_t hidden = 0;
  std::size_t message = 0;
  double exclude = 5.0;
  bool sweep = false;
  std::vector<std::string> sweep_rates{"40..200", "step", "20"};
  std::string plot_data;
  bool ablation = false;
  std::size_t ablation_seeds = 8;
  std::uint64_t ablation_seed = 1000;
  bool ablation_noise = true;
};

int run_eval(const EvalArgs& a) {
  Dataset d = load_dataset(a.data);
  Model m = load_model(a.weights, a.hidden, a.message);
  std::size_t H = 0, M = 0;
  check(ring_model_dims(m.get(), &H, &M, nullptr));
  std::cout << "model H=" << H << " M=" << M << ", " << ring_dataset_count(d.get())
            << " sequences, first " << a.exclude << " s excluded\n\n";

  ring_mae mae{}, ident{}, dr{};
  check(ring_eval_mae(m.get(), d.get(), a.exclude, &mae));
  check(ring_eval_baseline_mae(RING_BASELINE_IDENTITY, d.get(), a.exclude, &ident));
  check(ring_eval_baseline_mae(RING_BASELINE_DEAD_RECKONING, d.get(), a.exclude, &dr));
  std::cout << "method          mae\n";
  print_mae_row("ring          ", mae);
  print_mae_row("identity      ", ident);
  print_mae_row("dead-reckoning", dr);

  if (a.sweep) {
    const auto rates = parse_rates(a.sweep_rates);
    std::vector<ring_mae> rows(rates.size());
    check(ring_eval_rate_sweep(m.get(), d.get(), rates.data(), rates.size(), a.exclude, rows.data()));
    std::cout << "\nrate sweep (same motions, resampled)\nrate_hz   mae\n";
    for (std::size_t k = 0; k < rates.size(); ++k) print_mae_row(fmt("%7.1f", rates[k]), rows[k]);
    if (!a.plot_data.empty()) {
      std::ofstream out(a.plot_data, std::ios::binary | std::ios::trunc);
      out << "rate_hz,mae_deg,std_deg,trials\n";
      for (std::size_t k = 0; k < rates.size(); ++k)
        out << rates[k] << "," << rows[k].mean_deg << "," << rows[k].std_deg << "," << rows[k].trials << "\n";
      if (!out) throw Failure{kIoError, "failed writing " + a.plot_data};
      std::cout << "plot data " << a.plot_data << "\n";
    }
  }

  if (a.ablation) {
    std::size_t T = 0;
    double F = 0.0;
    check(ring_dataset_info(d.get(), 0, &T, nullptr, &F));
    std::vector<std::uint64_t> seeds(a.ablation_seeds);
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = a.ablation_seed + k;
    ring_mae rows[8];
    check(ring_eval_ablation(m.get(), seeds.data(), seeds.size(), T, F, a.exclude, a.ablation_noise ? 1 : 0,
                             rows));
    std::cout << "\nablation (" << seeds.size() << " sequences per row, T=" << T << ", F=" << F
              << " Hz)\nnonrigid misaligned sparse   mae\n";
    for (int r = 0; r < 8; ++r) {
      std::cout << "   " << ((r >> 2) & 1) << "        " << ((r >> 1) & 1) << "        " << (r & 1) << "   ";
      print_mae_row("", rows[r]);
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
  std::string weights;
  std::size_t bodies = 3;
  std::size_t iterations = 10000;
  std::size_t warmup = 1000;
};

int run_bench(const BenchArgs& a) {
  if (a.iterations == 0) throw Failure{kUsage, "--iterations must be >= 1"};
  if (a.bodies == 0) throw Failure{kUsage, "--N must be >= 1"};
  Model m = load_model(a.weights, 0, 0);
  std::vector<int> parents(a.bodies);
  for (std::size_t i = 0; i < a.bodies; ++i) parents[i] = static_cast<int>(i);
  ring_stepper* raw = nullptr;
  check(ring_stepper_create(m.get(), parents.data(), parents.size(), &raw));
  Stepper s(raw);

  // A slowly turning chain at rest under gravity; the values only need to be plausible.
  std::vector<double> x(a.bodies * 10, 0.0), y(a.bodies * 4);
  auto fill = [&](std::size_t k) {
    for (std::size_t i = 0; i < a.bodies; ++i) {
      double* xi = &x[i * 10];
      const double t = 0.01 * static_cast<double>(k);
      xi[0] = 0.3 * std::sin(t + i);
      xi[1] = 0.2 * std::cos(t);
      xi[2] = 0.1;
      xi[5] = 9.81;
      xi[9] = 0.01;
    }
  };
  for (std::size_t k = 0; k < a.warmup; ++k) {
    fill(k);
    check(ring_stepper_step(s.get(), x.data(), y.data()));
  }
  std::vector<double> us(a.iterations);
  for (std::size_t k = 0; k < a.iterations; ++k) {
    fill(a.warmup + k);
    const auto t0 = std::chrono::steady_clock::now();
    check(ring_stepper_step(s.get(), x.data(), y.data()));
    us[k] = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - t0).count();
  }
  std::vector<double> sorted = us;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                          : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
  std::size_t H = 0, M = 0;
  check(ring_model_dims(m.get(), &H, &M, nullptr));
  std::cout << "model H=" << H << " M=" << M << ", N=" << a.bodies << ", single thread\n";
  if (a.iterations == 1) {
    std::cout << "step latency  " << fmt("%.2f us (single sample)", median) << "\n";
  } else {
    const std::size_t i99 = std::min(sorted.size() - 1, static_cast<std::size_t>(std::ceil(0.99 * sorted.size())) - 1);
    std::cout << "iterations    " << a.iterations << " (after " << a.warmup << " warm-up)\n"
              << "median        " << fmt("%.2f us", median) << "\n"
              << "p99           " << fmt("%.2f us", sorted[i99]) << "\n";
  }
  std::cout << "max rate      " << fmt("%.0f Hz", 1e6 / median) << "\n";
  for (double F = 40.0; F <= 200.0; F += 20.0) {
    const bool ok = median < 1e6 / F;
    std::cout << fmt("%5.0f Hz  ", F) << (ok ? "real-time" : "NOT real-time") << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RING: recurrent inertial graph-based orientation estimator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ring_version()));

  GenerateArgs g;
  auto* gen = app.add_subcommand("generate", "simulate random chains and write a dataset");
  gen->add_option("--seed", g.seed, "root seed")->capture_default_str();
  gen->add_option("--count", g.count, "number of sequences")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--timesteps", g.timesteps, "samples per sequence")->capture_default_str();
  gen->add_option("--rates", g.rates, "rate set, e.g. '40..200 step 20' or '50,100'")->capture_default_str();
  gen->add_option("--flags", g.flags, "any of nonrigid, misaligned, sparse");
  gen->add_option("--bodies", g.bodies, "chain length")->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_flag("--no-noise", g.no_noise, "disable IMU noise and bias");
  gen->add_option("--config", g.config, "randomization ranges file")->check(CLI::ExistingFile);
  gen->add_option("--out", g.out, "output dataset")->required();

  TrainArgs t;
  auto* tr = app.add_subcommand("train", "train a model on a dataset");
  tr->add_option("--data", t.data, "training dataset")->required();
  tr->add_option("--validation", t.validation, "held-out dataset for periodic MAE");
  tr->add_option("--H", t.hidden, "hidden width")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--M", t.message, "message width")->capture_default_str();
  tr->add_option("--steps", t.steps, "optimizer steps")->capture_default_str();
  tr->add_option("--batch", t.batch, "sequences per step")->capture_default_str()->check(CLI::PositiveNumber);
  tr->add_option("--lr", t.lr, "peak learning rate")->capture_default_str();
  tr->add_flag("--no-cosine", t.no_cosine, "constant learning rate");
  tr->add_option("--clip", t.clip, "global gradient-norm clip (0 disables)")->capture_default_str();
  tr->add_option("--warmup", t.warmup, "seconds at the start of each sequence left out of the loss")
      ->capture_default_str();
  tr->add_option("--truncation", t.truncation, "truncated backprop length (0 = full)")->capture_default_str();
  tr->add_option("--validate-every", t.validation_every, "steps between validation runs")->capture_default_str();
  tr->add_option("--exclude", t.exclude, "validation exclusion window in seconds")->capture_default_str();
  tr->add_option("--seed", t.seed, "initialization and shuffling seed")->capture_default_str();
  tr->add_option("--out-weights", t.out_weights, "output weights")->required();
  tr->add_option("--log", t.log, "JSON-lines log (default: <out-weights>.log.jsonl)");
  tr->add_flag("--quiet", t.quiet, "no progress on stdout");

  EvalArgs e;
  auto* ev = app.add_subcommand("eval", "report MAE, rate sweeps and ablations");
  ev->add_option("--data", e.data, "dataset")->required();
  ev->add_option("--weights", e.weights, "weights file")->required();
  ev->add_option("--H", e.hidden, "expected hidden width (0 = take from file)")->capture_default_str();
  ev->add_option("--M", e.message, "expected message width (0 = take from file)")->capture_default_str();
  ev->add_option("--exclude", e.exclude, "seconds excluded at the start of each sequence")->capture_default_str();
  ev->add_flag("--sweep-rates", e.sweep, "resample every sequence to each rate");
  ev->add_option("--rates", e.sweep_rates, "rates for the sweep")->capture_default_str();
  ev->add_option("--plot-data", e.plot_data, "CSV output for the sweep");
  ev->add_flag("--ablation", e.ablation, "evaluate the nonrigid/misaligned/sparse grid");
  ev->add_option("--ablation-seeds", e.ablation_seeds, "sequences per grid row")->capture_default_str()
      ->check(CLI::PositiveNumber);
  ev->add_option("--ablation-seed", e.ablation_seed, "first seed of the grid sequences")->capture_default_str();

  BenchArgs b;
  auto* be = app.add_subcommand("bench", "measure single-step latency");
  be->add_option("--weights", b.weights, "weights file")->required();
  be->add_option("--N", b.bodies, "chain length")->capture_default_str();
  be->add_option("--iterations", b.iterations, "timed steps")->capture_default_str();
  be->add_option("--warmup", b.warmup, "untimed steps before measuring")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) return run_generate(g);
    if (tr->parsed()) return run_train(t);
    if (ev->parsed()) return run_eval(e);
    if (be->parsed()) return run_bench(b);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kOther;
  }
  return kOther;
}
