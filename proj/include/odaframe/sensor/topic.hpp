// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace oda {

/// Nanoseconds since the Unix epoch.
using Timestamp = std::uint64_t;
/// Nanoseconds.
using Duration = std::uint64_t;

inline constexpr Duration kNsPerMs = 1'000'000ULL;
inline constexpr Duration kNsPerSec = 1'000'000'000ULL;

/// Slash-separated sensor key, e.g. "/rack4/chassis2/server3/power". The last
/// segment names the sensor; the preceding ones give its placement.
class Topic {
 public:
  Topic() = default;

  /// Validates and wraps `path`. Throws Error(kInvalidTopic).
  explicit Topic(std::string path);

  static bool is_valid(std::string_view path) noexcept;

  const std::string& str() const noexcept { return path_; }
  bool empty() const noexcept { return path_.empty(); }

  /// Last segment.
  std::string_view name() const noexcept;
  /// Placement with a trailing slash, e.g. "/rack4/chassis2/server3/".
  std::string_view parent_path() const noexcept;
  std::vector<std::string_view> segments() const;

  auto operator<=>(const Topic&) const = default;

 private:
  std::string path_;
};

inline std::ostream& operator<<(std::ostream& os, const Topic& t) {
  return os << t.str();
}

/// True when `topic` lies under node path or topic prefix `prefix`.
/// "/" matches everything; "/a/b" matches "/a/b" and "/a/b/...".
bool topic_has_prefix(std::string_view topic, std::string_view prefix) noexcept;

struct SensorReading {
  std::int64_t value = 0;
  Timestamp timestamp = 0;

  friend bool operator==(const SensorReading&, const SensorReading&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const SensorReading& r) {
  return os << "{v=" << r.value << ", t=" << r.timestamp << "}";
}

}  // namespace oda

template <>
struct std::hash<oda::Topic> {
  std::size_t operator()(const oda::Topic& t) const noexcept {
    return std::hash<std::string>{}(t.str());
  }
};
