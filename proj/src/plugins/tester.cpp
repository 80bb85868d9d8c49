// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/tester.hpp"

#include <cstdio>

#include "odaframe/common/error.hpp"

namespace oda {

TesterSource::TesterSource(std::string prefix, std::size_t sensors, Duration interval)
    : interval_(interval) {
  if (interval == 0) throw Error(ErrorCode::kInvalidArgument, "tester interval must be positive");
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  topics_.reserve(sensors);
  char buf[32];
  for (std::size_t i = 0; i < sensors; ++i) {
    std::snprintf(buf, sizeof buf, "/t%04zu", i);
    topics_.emplace_back(prefix + buf);
  }
}

void TesterSource::sample(Timestamp now, const Sink& sink) {
  ++counter_;
  for (std::size_t i = 0; i < topics_.size(); ++i) sink(i, {counter_, now});
}

}  // namespace oda
