// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oda {

LoadProfile::LoadProfile(std::uint64_t seed, double min_phase_s, double max_phase_s, double ramp_s)
    : rng_(seed), min_phase_s_(min_phase_s), max_phase_s_(max_phase_s), ramp_s_(ramp_s) {
  to_ = std::uniform_real_distribution<double>(0.05, 0.95)(rng_);
  from_ = to_;
  phase_end_ = std::uniform_real_distribution<double>(min_phase_s_, max_phase_s_)(rng_);
}

void LoadProfile::advance() {
  phase_start_ = phase_end_;
  phase_end_ += std::uniform_real_distribution<double>(min_phase_s_, max_phase_s_)(rng_);
  from_ = to_;
  to_ = std::uniform_real_distribution<double>(0.05, 0.95)(rng_);
}

double LoadProfile::at(double t_s) {
  while (t_s >= phase_end_) advance();
  const double into = t_s - phase_start_;
  if (ramp_s_ <= 0.0 || into >= ramp_s_) return to_;
  return from_ + (to_ - from_) * into / ramp_s_;
}

PowerSignal::PowerSignal(PowerModel model, std::uint64_t seed, double phase)
    : model_(model), rng_(seed), phase_(phase) {}

double PowerSignal::next(double load, double t_s) {
  ar_ = model_.ar_phi * ar_ + model_.noise_w * noise_(rng_);
  const double periodic =
      model_.amplitude_w * std::sin(2.0 * std::numbers::pi * t_s / model_.period_s + phase_);
  return model_.base_w + model_.coupling_w * std::clamp(load, 0.0, 1.0) + ar_ + periodic;
}

CounterSignal::CounterSignal(std::uint64_t seed, std::int64_t start, double jitter)
    : rng_(seed), jitter_(jitter), value_(start) {}

std::int64_t CounterSignal::advance(double rate_per_s, double dt_s) {
  double inc = rate_per_s * dt_s;
  if (jitter_ > 0.0) inc *= std::max(0.0, 1.0 + jitter_ * noise_(rng_));
  inc = std::max(0.0, inc) + carry_;
  const double whole = std::floor(inc);
  carry_ = inc - whole;
  value_ += static_cast<std::int64_t>(whole);
  return value_;
}

}  // namespace oda
