// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/blocks/block_engine.hpp"

#include <algorithm>
#include <regex>
#include <set>
#include <unordered_set>

namespace oda {

namespace {

std::optional<std::regex> compile_filter(const SensorExpression& expr) {
  if (!expr.filter) return std::nullopt;
  return std::regex(*expr.filter);
}

void append_unique(std::vector<Topic>& out, std::unordered_set<std::string>& seen,
                   const std::vector<Topic>& topics) {
  for (const auto& t : topics) {
    if (seen.insert(t.str()).second) out.push_back(t);
  }
}

}  // namespace

std::vector<NodeId> expression_nodes(const SensorTree& tree, const SensorExpression& expr) {
  auto candidates = tree.nodes_at_level(expr.level);
  const auto filter = compile_filter(expr);
  if (!filter) return candidates;
  std::vector<NodeId> out;
  for (NodeId id : candidates) {
    if (std::regex_search(tree.node(id).path, *filter)) out.push_back(id);
  }
  return out;
}

std::vector<Topic> expression_domain(const SensorTree& tree, const SensorExpression& expr) {
  std::vector<Topic> out;
  for (NodeId id : expression_nodes(tree, expr)) {
    for (std::size_t leaf_id : tree.node(id).leaves) {
      const auto& leaf = tree.leaves()[leaf_id];
      if (leaf.name == expr.sensor_name) out.push_back(leaf.topic);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Topic> resolve_for_block(const SensorTree& tree, const SensorExpression& expr,
                                     NodeId block_node) {
  std::vector<Topic> out;
  for (const auto& topic : expression_domain(tree, expr)) {
    const auto* leaf = tree.find_leaf(topic.str());
    if (leaf && tree.hierarchically_related(leaf->node, block_node)) out.push_back(topic);
  }
  return out;
}

std::optional<Topic> resolve_output_for_block(const SensorTree& tree,
                                              const SensorExpression& expr,
                                              NodeId block_node) {
  const auto nodes = expression_nodes(tree, expr);
  if (!std::binary_search(nodes.begin(), nodes.end(), block_node,
                          [&tree](NodeId a, NodeId b) {
                            return tree.node(a).path < tree.node(b).path;
                          })) {
    return std::nullopt;
  }
  return Topic(tree.node(block_node).path + expr.sensor_name);
}

InstantiationResult instantiate_blocks(const SensorTree& tree, const BlockTemplate& tmpl) {
  // Step 1: node sets of the output expressions.
  std::vector<std::vector<NodeId>> output_nodes;
  std::set<std::string> block_paths;
  for (const auto& expr : tmpl.outputs) {
    output_nodes.push_back(expression_nodes(tree, expr));
    for (NodeId id : output_nodes.back()) block_paths.insert(tree.node(id).path);
  }
  std::vector<std::vector<std::pair<Topic, NodeId>>> input_domains;
  for (const auto& expr : tmpl.inputs) {
    auto& domain = input_domains.emplace_back();
    for (auto& topic : expression_domain(tree, expr)) {
      const NodeId owner = tree.find_leaf(topic.str())->node;
      domain.emplace_back(std::move(topic), owner);
    }
  }

  InstantiationResult result;
  // Step 2 + 3: one block per distinct node, every expression resolved.
  for (const auto& path : block_paths) {
    const NodeId node = *tree.find_node(path);
    Block block{path, {}, {}};
    std::unordered_set<std::string> seen;
    std::string failure = tmpl.inputs.empty() ? "template has no inputs" : "";
    for (std::size_t i = 0; i < tmpl.inputs.size() && failure.empty(); ++i) {
      std::vector<Topic> topics;
      for (const auto& [topic, owner] : input_domains[i]) {
        if (tree.hierarchically_related(owner, node)) topics.push_back(topic);
      }
      if (topics.empty()) {
        failure = "input " + tmpl.inputs[i].to_string() + " has no hierarchically related topic";
      }
      append_unique(block.input_topics, seen, topics);
    }
    if (!failure.empty()) {
      result.skipped.push_back({path, std::move(failure)});
      continue;
    }
    seen.clear();
    for (std::size_t j = 0; j < tmpl.outputs.size(); ++j) {
      const auto& nodes = output_nodes[j];
      if (std::find(nodes.begin(), nodes.end(), node) != nodes.end()) {
        append_unique(block.output_topics, seen,
                      {Topic(path + tmpl.outputs[j].sensor_name)});
      }
    }
    result.blocks.push_back(std::move(block));
  }

  if (result.blocks.empty()) {
    std::string message = "no blocks could be built";
    if (block_paths.empty()) {
      message += ": output expressions match no tree node";
    } else {
      message += " (" + std::to_string(result.skipped.size()) + " skipped; first " +
                 result.skipped.front().name + ": " + result.skipped.front().reason + ")";
    }
    throw InstantiationError(message, std::move(result.skipped));
  }
  return result;
}

std::optional<Block> instantiate_job_block(const SensorTree& tree, const BlockTemplate& tmpl,
                                           const std::string& job_id,
                                           std::span<const std::string> node_paths,
                                           const std::string& output_prefix,
                                           std::string* reason) {
  auto fail = [reason](std::string why) -> std::optional<Block> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };
  if (job_id.empty() || job_id.find('/') != std::string::npos) {
    return fail("job id is not a single topic segment");
  }
  std::vector<NodeId> nodes;
  for (const auto& path : node_paths) {
    std::string normalized = path;
    if (normalized.empty() || normalized.front() != '/') normalized.insert(0, "/");
    if (normalized.back() != '/') normalized.push_back('/');
    auto id = tree.find_node(normalized);
    if (!id) return fail("node " + path + " is not in the sensor tree");
    nodes.push_back(*id);
  }

  Block block;
  block.name = job_id;
  std::unordered_set<std::string> seen;
  for (const auto& expr : tmpl.inputs) {
    const auto domain = expression_domain(tree, expr);
    for (const auto& topic : domain) {
      const auto owner = tree.find_leaf(topic.str())->node;
      for (NodeId node : nodes) {
        if (tree.hierarchically_related(owner, node)) {
          if (seen.insert(topic.str()).second) block.input_topics.push_back(topic);
          break;
        }
      }
    }
  }
  if (block.input_topics.empty()) return fail("no input resolves on the job's nodes");

  std::string prefix = output_prefix;
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  for (const auto& expr : tmpl.outputs) {
    block.output_topics.emplace_back(prefix + "/" + job_id + "/" + expr.sensor_name);
  }
  return block;
}

std::optional<std::string> validate_block(const SensorTree& tree, const Block& block) {
  const auto node = tree.find_node(block.name);
  if (!node) return "block node " + block.name + " is not in the tree";
  if (block.input_topics.empty()) return "block has no inputs";
  for (const auto& out : block.output_topics) {
    if (out.parent_path() != block.name) {
      return "output " + out.str() + " is not a leaf of " + block.name;
    }
  }
  for (const auto& in : block.input_topics) {
    const auto* leaf = tree.find_leaf(in.str());
    if (!leaf) return "input " + in.str() + " is not in the tree";
    if (!tree.hierarchically_related(leaf->node, *node)) {
      return "input " + in.str() + " is not hierarchically related to " + block.name;
    }
  }
  return std::nullopt;
}

}  // namespace oda
