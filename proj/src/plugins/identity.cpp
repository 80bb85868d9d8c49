// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/identity.hpp"

#include <algorithm>

namespace oda {

void IdentityOperator::compute(const Block& block, ComputeContext& ctx) {
  if (block.input_topics.empty()) return;
  for (std::size_t k = 0; k < block.output_topics.size(); ++k) {
    const auto& input = block.input_topics[std::min(k, block.input_topics.size() - 1)];
    if (auto r = ctx.latest(input)) ctx.emit(block.output_topics[k], r->value);
  }
}

}  // namespace oda
