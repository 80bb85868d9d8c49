// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/ops/operator.hpp"

#include <spdlog/spdlog.h>

#include "odaframe/common/error.hpp"

namespace oda {

std::vector<SensorReading> ComputeContext::query_relative(const Topic& topic,
                                                          Duration offset) const {
  return engine_.query(QueryRequest::relative(topic, offset)).readings;
}

std::vector<SensorReading> ComputeContext::query_absolute(const Topic& topic, Timestamp t0,
                                                          Timestamp t1) const {
  return engine_.query(QueryRequest::absolute(topic, t0, t1)).readings;
}

std::optional<SensorReading> ComputeContext::latest(const Topic& topic) const {
  auto readings = query_relative(topic, 0);
  if (readings.empty()) return std::nullopt;
  return readings.back();
}

void ComputeContext::emit(const Topic& topic, std::int64_t value) {
  outputs_.push_back({topic, {value, now_}});
}

void ComputeContext::emit_operator_output(std::string_view sensor_name, std::int64_t value) {
  emit(op_.operator_output_topic(sensor_name), value);
}

Operator::Operator(OperatorConfig config) : config_(std::move(config)), name_(config_.name) {}

const Block* Operator::find_block(std::string_view name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

Topic Operator::operator_output_topic(std::string_view sensor_name) const {
  std::string prefix = config_.operator_output_prefix;
  if (prefix.empty()) prefix = "/oda/" + name_;
  if (name_ != config_.name) prefix += "/" + name_;
  while (prefix.size() > 1 && prefix.back() == '/') prefix.pop_back();
  return Topic(prefix + "/" + std::string(sensor_name));
}

std::vector<Topic> Operator::output_topics() const {
  std::vector<Topic> out;
  for (const auto& b : blocks_) {
    auto topics = block_outputs(b);
    out.insert(out.end(), topics.begin(), topics.end());
  }
  for (const auto& name : config_.block_template.operator_outputs) {
    out.push_back(operator_output_topic(name));
  }
  return out;
}

void Operator::compute_guarded(const Block& block, ComputeContext& ctx) {
  try {
    compute(block, ctx);
  } catch (const std::exception& e) {
    count_failure();
    spdlog::warn("operator {}: block {} failed: {}", name_, block.name, e.what());
  }
}

void Operator::compute_all(ComputeContext& ctx) {
  for (const auto& block : blocks_) compute_guarded(block, ctx);
}

std::string Operator::custom_action(const std::string& action,
                                    const std::map<std::string, std::string>&,
                                    ComputeContext&) {
  throw Error(ErrorCode::kUnknownAction,
              "operator " + name_ + " does not support action '" + action + "'");
}

}  // namespace oda
