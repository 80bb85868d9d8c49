// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/actuator.hpp"

#include <spdlog/spdlog.h>

namespace oda {

ActuatorOperator::ActuatorOperator(OperatorConfig config) : Operator(std::move(config)) {
  const auto& p = this->config().params;
  knob_ = p.get_or("knob", "frequency");
  threshold_ = p.get_double("threshold", 0.0);
  high_ = p.get_or("high", "max");
  low_ = p.get_or("low", "min");
}

void ActuatorOperator::compute(const Block& block, ComputeContext& ctx) {
  if (block.input_topics.empty()) return;
  auto r = ctx.latest(block.input_topics.front());
  if (!r) return;
  const std::string& setting = static_cast<double>(r->value) > threshold_ ? high_ : low_;
  intents_.fetch_add(1);
  spdlog::info("operator {}: would set {} of {} to {} (input {} = {})", name(), knob_, block.name,
               setting, block.input_topics.front().str(), r->value);
}

}  // namespace oda
