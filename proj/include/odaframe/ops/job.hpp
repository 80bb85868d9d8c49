// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <istream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

struct JobInfo {
  std::string job_id;
  std::string user_id;
  std::vector<std::string> node_list;
  Timestamp start = 0;
  std::optional<Timestamp> end;

  /// start <= now < end (open-ended when end is unset).
  bool active_at(Timestamp now) const noexcept {
    return start <= now && (!end || now < *end);
  }

  friend bool operator==(const JobInfo&, const JobInfo&) = default;
};

/// Throws Error(kInvalidArgument) when node_list is empty or end <= start.
void validate_job(const JobInfo& job);

/// Thread-safe set of known jobs, fed from JSON lines or REST injection.
///
/// One JSON object per line:
///   {"job_id": "j1", "user_id": "alice", "nodes": ["/r01/c01/s01/"],
///    "start": 10, "end": 20}
/// "end" may be omitted or null for running jobs.
class JobRegistry {
 public:
  void add(JobInfo job);
  /// Replaces a job with the same id, or adds it.
  void upsert(JobInfo job);
  std::vector<JobInfo> all() const;
  std::vector<JobInfo> active_at(Timestamp now) const;

  /// Returns the number of jobs read. Throws ParseError with the line number.
  std::size_t load_json_lines(std::istream& in);

  static JobInfo parse_json(const std::string& text);
  static std::string to_json(const JobInfo& job);

 private:
  mutable std::mutex mutex_;
  std::vector<JobInfo> jobs_;
};

}  // namespace oda
