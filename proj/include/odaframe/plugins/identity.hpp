// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "odaframe/ops/operator.hpp"

namespace oda {

/// Copies the newest reading of input k to output k; surplus outputs repeat
/// the last input.
class IdentityOperator : public Operator {
 public:
  using Operator::Operator;

  void compute(const Block& block, ComputeContext& ctx) override;
};

}  // namespace oda
