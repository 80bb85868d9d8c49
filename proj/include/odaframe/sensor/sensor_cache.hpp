// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

/// Time-bounded ring of recent readings for one sensor.
///
/// Retains every reading whose timestamp is within `capacity_ns` of the newest
/// one. Readings arriving older than the current newest are dropped and
/// counted; equal timestamps are kept. The ring starts at
/// capacity/interval + 10% slots and doubles if sampling is denser than the
/// nominal interval.
///
/// Two views are offered:
///  - relative: everything within `offset` of the newest reading. The start
///    index is guessed from the nominal interval, then corrected by at most
///    kFixupWindow single steps before falling back to binary search.
///  - absolute: everything in [t0, t1], located by binary search.
///
/// One writer, many readers. Views copy out under a shared lock.
class SensorCache {
 public:
  static constexpr std::size_t kFixupWindow = 16;

  SensorCache(Duration capacity_ns, Duration nominal_interval_ns);

  SensorCache(const SensorCache&) = delete;
  SensorCache& operator=(const SensorCache&) = delete;

  void store(const SensorReading& reading);

  std::vector<SensorReading> view_relative(Duration offset_ns) const;
  /// Throws Error(kInvalidRange) when t0 > t1.
  std::vector<SensorReading> view_absolute(Timestamp t0, Timestamp t1) const;

  std::optional<SensorReading> latest() const;
  std::optional<Timestamp> oldest_timestamp() const;
  /// All retained entries, oldest first.
  std::vector<SensorReading> snapshot() const;

  std::size_t size() const;
  std::size_t slot_count() const;
  bool empty() const { return size() == 0; }

  Duration capacity() const noexcept { return capacity_ns_; }
  Duration nominal_interval() const noexcept { return interval_ns_; }

  std::uint64_t dropped() const noexcept { return dropped_.load(); }
  /// Relative views that exhausted the fix-up window.
  std::uint64_t relative_fallbacks() const noexcept { return fallbacks_.load(); }

 private:
  const SensorReading& at(std::size_t i) const {
    return slots_[(head_ + i) % slots_.size()];
  }
  void grow();
  std::size_t lower_bound(Timestamp t) const;
  std::size_t upper_bound(Timestamp t) const;
  std::vector<SensorReading> copy_range(std::size_t from, std::size_t to) const;

  const Duration capacity_ns_;
  const Duration interval_ns_;

  mutable std::shared_mutex mutex_;
  std::vector<SensorReading> slots_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;

  std::atomic<std::uint64_t> dropped_{0};
  mutable std::atomic<std::uint64_t> fallbacks_{0};
};

}  // namespace oda
