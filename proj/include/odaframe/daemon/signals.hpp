// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace oda {

/// Node utilisation in [0, 1]: plateaus of random length and level joined by
/// linear ramps. Query with non-decreasing times.
class LoadProfile {
 public:
  LoadProfile(std::uint64_t seed, double min_phase_s = 20.0, double max_phase_s = 90.0,
              double ramp_s = 3.0);

  double at(double t_s);

 private:
  void advance();

  std::mt19937_64 rng_;
  double min_phase_s_;
  double max_phase_s_;
  double ramp_s_;
  double phase_start_ = 0.0;
  double phase_end_ = 0.0;
  double from_ = 0.0;
  double to_ = 0.0;
};

struct PowerModel {
  double base_w = 150.0;
  double coupling_w = 250.0;
  /// AR(1) coefficient per sample.
  double ar_phi = 0.8;
  double noise_w = 3.0;
  double period_s = 60.0;
  double amplitude_w = 5.0;
};

/// base + coupling * load + AR(1) noise + sinusoid.
class PowerSignal {
 public:
  PowerSignal(PowerModel model, std::uint64_t seed, double phase = 0.0);

  /// Next sample in watts.
  double next(double load, double t_s);

 private:
  PowerModel model_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  double phase_;
  double ar_ = 0.0;
};

/// Monotonic integer counter advanced by a rate with multiplicative noise.
class CounterSignal {
 public:
  CounterSignal(std::uint64_t seed, std::int64_t start = 0, double jitter = 0.0);

  std::int64_t advance(double rate_per_s, double dt_s);
  std::int64_t value() const noexcept { return value_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> noise_{0.0, 1.0};
  double jitter_;
  std::int64_t value_;
  double carry_ = 0.0;
};

/// Gaussian noise source shared by the simpler generators.
class Noise {
 public:
  explicit Noise(std::uint64_t seed) : rng_(seed) {}
  double operator()(double sigma) { return sigma * dist_(rng_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace oda
