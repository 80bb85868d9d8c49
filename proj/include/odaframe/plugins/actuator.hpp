// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>

#include "odaframe/ops/operator.hpp"

namespace oda {

/// Control stub: logs the knob setting it would apply for each block instead
/// of touching hardware. The setting is the newest value of the first input
/// compared against `threshold`: above it `high`, otherwise `low`.
///
/// Keys: knob ("frequency"), threshold (0), high ("max"), low ("min").
class ActuatorOperator : public Operator {
 public:
  explicit ActuatorOperator(OperatorConfig config);

  void compute(const Block& block, ComputeContext& ctx) override;

  std::uint64_t intents() const noexcept { return intents_.load(); }

 private:
  std::string knob_;
  double threshold_;
  std::string high_;
  std::string low_;
  std::atomic<std::uint64_t> intents_{0};
};

}  // namespace oda
