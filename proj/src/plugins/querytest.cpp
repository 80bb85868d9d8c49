// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/querytest.hpp"

#include <algorithm>
#include <chrono>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

bool declared(const Operator& op, std::string_view name) {
  const auto& names = op.config().block_template.operator_outputs;
  return std::find(names.begin(), names.end(), name) != names.end();
}

}  // namespace

QuerytestOperator::QuerytestOperator(OperatorConfig config) : Operator(std::move(config)) {
  const auto& p = this->config().params;
  prefix_ = p.get_or("prefix", "/");
  queries_ = static_cast<std::size_t>(std::max<std::int64_t>(p.get_int("queries", 10), 0));
  range_ = static_cast<Duration>(std::max<std::int64_t>(p.get_int("range_ms", 0), 0)) * kNsPerMs;
  const std::string mode = p.get_or("query_mode", "relative");
  if (mode == "relative") {
    mode_ = QueryMode::kRelative;
  } else if (mode == "absolute") {
    mode_ = QueryMode::kAbsolute;
  } else {
    throw ParseError(p.child("query_mode")->line, 1, "unknown query_mode '" + mode + "'");
  }
}

void QuerytestOperator::run_queries(ComputeContext& ctx, const std::vector<Topic>& topics) {
  if (queries_ == 0 || topics.empty()) return;
  std::vector<std::uint64_t> tick;
  tick.reserve(queries_);
  std::uint64_t returned = 0;
  for (std::size_t q = 0; q < queries_; ++q) {
    const Topic& topic = topics[(cursor_ + q) % topics.size()];
    const auto start = std::chrono::steady_clock::now();
    std::size_t got = 0;
    if (mode_ == QueryMode::kRelative) {
      got = ctx.engine().query(QueryRequest::relative(topic, range_)).readings.size();
    } else {
      const Timestamp now = ctx.now();
      got = ctx.engine().query(QueryRequest::absolute(topic, now > range_ ? now - range_ : 0, now))
                .readings.size();
    }
    const auto stop = std::chrono::steady_clock::now();
    tick.push_back(static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(stop - start).count()));
    returned += got;
  }
  cursor_ = (cursor_ + queries_) % topics.size();

  std::vector<std::uint64_t> sorted = tick;
  std::sort(sorted.begin(), sorted.end());
  auto pct = [&](double p) {
    return static_cast<std::int64_t>(sorted[static_cast<std::size_t>(p * static_cast<double>(sorted.size() - 1))]);
  };
  if (declared(*this, "latency-p50")) ctx.emit_operator_output("latency-p50", pct(0.5));
  if (declared(*this, "latency-p99")) ctx.emit_operator_output("latency-p99", pct(0.99));
  if (declared(*this, "latency-max")) ctx.emit_operator_output("latency-max", pct(1.0));
  if (declared(*this, "readings")) ctx.emit_operator_output("readings", static_cast<std::int64_t>(returned));

  std::lock_guard lock(mutex_);
  latencies_.insert(latencies_.end(), tick.begin(), tick.end());
  readings_ += returned;
}

void QuerytestOperator::compute_all(ComputeContext& ctx) {
  if (topics_.empty()) {
    auto tree = ctx.engine().navigator();
    for (auto& t : tree->topics_with_prefix(prefix_)) {
      // Never query our own outputs.
      if (!topic_has_prefix(t.str(), config().operator_output_prefix)) topics_.push_back(t);
    }
  }
  run_queries(ctx, topics_);
}

void QuerytestOperator::compute(const Block& block, ComputeContext& ctx) {
  run_queries(ctx, block.input_topics);
}

std::vector<std::uint64_t> QuerytestOperator::take_latencies() {
  std::lock_guard lock(mutex_);
  return std::exchange(latencies_, {});
}

std::uint64_t QuerytestOperator::readings_returned() const {
  std::lock_guard lock(mutex_);
  return readings_;
}

}  // namespace oda
