// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/sensor/sensor_cache.hpp"

#include <algorithm>
#include <mutex>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

std::size_t initial_slots(Duration capacity, Duration interval) {
  const double ratio = static_cast<double>(capacity) / static_cast<double>(interval);
  const auto slots = static_cast<std::size_t>(ratio * 1.1) + 2;
  return std::max<std::size_t>(slots, 4);
}

}  // namespace

SensorCache::SensorCache(Duration capacity_ns, Duration nominal_interval_ns)
    : capacity_ns_(capacity_ns), interval_ns_(nominal_interval_ns) {
  if (interval_ns_ == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cache interval must be positive");
  }
  slots_.resize(initial_slots(capacity_ns_, interval_ns_));
}

void SensorCache::store(const SensorReading& reading) {
  std::unique_lock lock(mutex_);
  if (count_ > 0 && reading.timestamp < at(count_ - 1).timestamp) {
    dropped_.fetch_add(1, std::memory_order_relaxed);
    return;
  }
  const Timestamp threshold =
      reading.timestamp > capacity_ns_ ? reading.timestamp - capacity_ns_ : 0;
  if (count_ == slots_.size()) {
    if (at(0).timestamp < threshold) {
      head_ = (head_ + 1) % slots_.size();
      --count_;
    } else {
      grow();
    }
  }
  slots_[(head_ + count_) % slots_.size()] = reading;
  ++count_;
  while (count_ > 1 && at(0).timestamp < threshold) {
    head_ = (head_ + 1) % slots_.size();
    --count_;
  }
}

void SensorCache::grow() {
  std::vector<SensorReading> bigger(slots_.size() * 2);
  for (std::size_t i = 0; i < count_; ++i) bigger[i] = at(i);
  slots_ = std::move(bigger);
  head_ = 0;
}

std::size_t SensorCache::lower_bound(Timestamp t) const {
  std::size_t lo = 0, hi = count_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (at(mid).timestamp < t) lo = mid + 1; else hi = mid;
  }
  return lo;
}

std::size_t SensorCache::upper_bound(Timestamp t) const {
  std::size_t lo = 0, hi = count_;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (at(mid).timestamp <= t) lo = mid + 1; else hi = mid;
  }
  return lo;
}

std::vector<SensorReading> SensorCache::copy_range(std::size_t from,
                                                   std::size_t to) const {
  std::vector<SensorReading> out;
  out.reserve(to > from ? to - from : 0);
  for (std::size_t i = from; i < to; ++i) out.push_back(at(i));
  return out;
}

std::vector<SensorReading> SensorCache::view_relative(Duration offset_ns) const {
  std::shared_lock lock(mutex_);
  if (count_ == 0) return {};
  const std::size_t last = count_ - 1;
  const Timestamp newest = at(last).timestamp;
  const Timestamp threshold = newest > offset_ns ? newest - offset_ns : 0;

  const Duration back = offset_ns / interval_ns_;
  std::size_t start = back >= last ? 0 : last - static_cast<std::size_t>(back);

  std::size_t steps = 0;
  bool resolved = false;
  if (at(start).timestamp < threshold) {
    while (steps < kFixupWindow && at(start).timestamp < threshold) {
      ++start;
      ++steps;
    }
    resolved = at(start).timestamp >= threshold;
  } else {
    while (steps < kFixupWindow && start > 0 && at(start - 1).timestamp >= threshold) {
      --start;
      ++steps;
    }
    resolved = start == 0 || at(start - 1).timestamp < threshold;
  }
  if (!resolved) {
    fallbacks_.fetch_add(1, std::memory_order_relaxed);
    start = lower_bound(threshold);
  }
  return copy_range(start, count_);
}

std::vector<SensorReading> SensorCache::view_absolute(Timestamp t0,
                                                      Timestamp t1) const {
  if (t0 > t1) {
    throw Error(ErrorCode::kInvalidRange, "absolute range has t0 > t1");
  }
  std::shared_lock lock(mutex_);
  return copy_range(lower_bound(t0), upper_bound(t1));
}

std::optional<SensorReading> SensorCache::latest() const {
  std::shared_lock lock(mutex_);
  if (count_ == 0) return std::nullopt;
  return at(count_ - 1);
}

std::optional<Timestamp> SensorCache::oldest_timestamp() const {
  std::shared_lock lock(mutex_);
  if (count_ == 0) return std::nullopt;
  return at(0).timestamp;
}

std::vector<SensorReading> SensorCache::snapshot() const {
  std::shared_lock lock(mutex_);
  return copy_range(0, count_);
}

std::size_t SensorCache::size() const {
  std::shared_lock lock(mutex_);
  return count_;
}

std::size_t SensorCache::slot_count() const {
  std::shared_lock lock(mutex_);
  return slots_.size();
}

}  // namespace oda
