// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/proc_stats.hpp"

#include <sys/resource.h>

#include <fstream>
#include <string>

namespace oda {

namespace {

double seconds(const timeval& tv) {
  return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) * 1e-6;
}

std::uint64_t read_rss() {
  std::ifstream in("/proc/self/status");
  std::string key;
  while (in >> key) {
    if (key == "VmRSS:") {
      std::uint64_t kb = 0;
      in >> kb;
      return kb * 1024;
    }
    in.ignore(1 << 12, '\n');
  }
  return 0;
}

}  // namespace

ProcSample sample_process() {
  ProcSample s;
  rusage ru{};
  getrusage(RUSAGE_SELF, &ru);
  s.cpu_seconds = seconds(ru.ru_utime) + seconds(ru.ru_stime);
  s.wall = std::chrono::steady_clock::now();
  s.rss_bytes = read_rss();
  return s;
}

double cpu_percent(const ProcSample& from, const ProcSample& to) {
  const double wall = std::chrono::duration<double>(to.wall - from.wall).count();
  if (wall <= 0.0) return 0.0;
  return 100.0 * (to.cpu_seconds - from.cpu_seconds) / wall;
}

}  // namespace oda
