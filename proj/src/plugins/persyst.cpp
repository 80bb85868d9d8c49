// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/persyst.hpp"

#include <cmath>

namespace oda {

Topic decile_topic(const Topic& output, std::size_t k) {
  return Topic(output.str() + "-d" + std::to_string(k));
}

PersystOperator::PersystOperator(OperatorConfig config) : Operator(std::move(config)) {
  const std::int64_t window_ms = this->config().params.get_int("window_ms", 0);
  window_ = window_ms > 0 ? static_cast<Duration>(window_ms) * kNsPerMs : this->config().interval_ns;
}

std::vector<Topic> PersystOperator::block_outputs(const Block& block) const {
  std::vector<Topic> out;
  for (const auto& t : block.output_topics)
    for (std::size_t k = 0; k < kDecileCount; ++k) out.push_back(decile_topic(t, k));
  return out;
}

void PersystOperator::compute(const Block& block, ComputeContext& ctx) {
  const Timestamp now = ctx.now();
  const Timestamp t0 = now >= window_ ? now - window_ + 1 : 0;
  std::vector<double> values;
  for (const auto& topic : block.input_topics) {
    for (const auto& r : ctx.query_absolute(topic, t0, now)) values.push_back(static_cast<double>(r.value));
  }
  if (values.empty()) return;
  const auto d = deciles(std::move(values));
  for (const auto& out : block.output_topics)
    for (std::size_t k = 0; k < kDecileCount; ++k) ctx.emit(decile_topic(out, k), std::llround(d[k]));
}

}  // namespace oda
