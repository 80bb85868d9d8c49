// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odaframe/blocks/sensor_expression.hpp"
#include "odaframe/common/error.hpp"
#include "odaframe/tree/sensor_tree.hpp"

namespace oda {

/// Resolved analysis unit rooted at a tree node (or, for job operators, a
/// job id). Inputs keep template order; each expression's topics are sorted.
struct Block {
  std::string name;
  std::vector<Topic> input_topics;
  std::vector<Topic> output_topics;

  friend bool operator==(const Block&, const Block&) = default;
};

struct SkippedBlock {
  std::string name;
  std::string reason;
};

struct InstantiationResult {
  std::vector<Block> blocks;
  std::vector<SkippedBlock> skipped;
};

class InstantiationError : public Error {
 public:
  InstantiationError(const std::string& message, std::vector<SkippedBlock> skipped)
      : Error(ErrorCode::kInstantiationError, message), skipped_(std::move(skipped)) {}

  const std::vector<SkippedBlock>& skipped() const noexcept { return skipped_; }

 private:
  std::vector<SkippedBlock> skipped_;
};

/// Internal nodes at the expression's level whose path matches its filter
/// (unanchored regex search), sorted by path.
std::vector<NodeId> expression_nodes(const SensorTree& tree, const SensorExpression& expr);

/// Existing leaves named expr.sensor_name under expression_nodes(), sorted.
std::vector<Topic> expression_domain(const SensorTree& tree, const SensorExpression& expr);

/// Domain topics whose owning node is hierarchically related to `block_node`.
std::vector<Topic> resolve_for_block(const SensorTree& tree, const SensorExpression& expr,
                                     NodeId block_node);

/// Output topic of `block_node` for an output expression, synthesized as
/// node path + sensor name. Empty when the node is outside the expression's
/// node set.
std::optional<Topic> resolve_output_for_block(const SensorTree& tree,
                                              const SensorExpression& expr,
                                              NodeId block_node);

/// Three-step generation: collect the output expressions' node sets, create
/// one block per distinct node, resolve every expression per block. Blocks
/// with an unresolvable input are skipped and reported. Blocks are sorted by
/// name. Throws InstantiationError when nothing can be built.
InstantiationResult instantiate_blocks(const SensorTree& tree, const BlockTemplate& tmpl);

/// Block for a job: inputs are the template inputs resolved against each node
/// in `node_paths`; outputs are "<output_prefix>/<job_id>/<name>" for each
/// output expression. Returns nullopt (with `reason` set) when no input
/// resolves or a node is unknown to the tree.
std::optional<Block> instantiate_job_block(const SensorTree& tree, const BlockTemplate& tmpl,
                                           const std::string& job_id,
                                           std::span<const std::string> node_paths,
                                           const std::string& output_prefix,
                                           std::string* reason = nullptr);

/// Checks the structural block invariants; returns a description of the first
/// violation, or nullopt.
std::optional<std::string> validate_block(const SensorTree& tree, const Block& block);

}  // namespace oda
