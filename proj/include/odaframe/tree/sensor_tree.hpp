// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

/// Vertical position in the sensor tree. The root is not numbered: topdown+0
/// is depth 1, bottomup+0 (written "bottomup") is the deepest internal level.
/// Offsets are signed; bottomup-1 is one level above the deepest.
struct LevelSpec {
  enum class Anchor { kTopDown, kBottomUp };

  Anchor anchor = Anchor::kTopDown;
  int offset = 0;

  static LevelSpec topdown(int k = 0) { return {Anchor::kTopDown, k}; }
  static LevelSpec bottomup(int k = 0) { return {Anchor::kBottomUp, -k}; }

  /// Absolute depth for a tree whose deepest internal node is `max_depth`.
  /// May fall outside [1, max_depth].
  int resolve(int max_depth) const noexcept {
    return anchor == Anchor::kTopDown ? 1 + offset : max_depth + offset;
  }

  std::string to_string() const;

  friend bool operator==(const LevelSpec&, const LevelSpec&) = default;
};

/// Regular expressions segmenting a topic's placement, one per tree level.
struct HierarchySpec {
  std::vector<std::string> level_patterns;
};

using NodeId = std::size_t;

/// Hierarchical index over a set of topics. Internal nodes are system
/// components keyed by path ("/r03/c02/"), leaves are sensors. Immutable once
/// built; share it through std::shared_ptr<const SensorTree>.
class SensorTree {
 public:
  static constexpr NodeId kRoot = 0;

  struct Node {
    std::string path;  // "/" for the root, otherwise "/a/b/"
    std::string name;
    int depth = 0;
    NodeId parent = kRoot;
    std::vector<NodeId> children;
    std::vector<std::size_t> leaves;
  };

  struct Leaf {
    Topic topic;
    std::string name;
    NodeId node = kRoot;
  };

  SensorTree();

  bool empty() const noexcept { return leaves_.empty(); }
  /// Depth of the deepest internal node, 0 for an empty tree.
  int depth() const noexcept { return max_depth_; }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Leaf>& leaves() const noexcept { return leaves_; }

  std::optional<NodeId> find_node(std::string_view path) const;
  const Leaf* find_leaf(std::string_view topic) const;

  /// Internal nodes at the resolved level, sorted by path. Empty when the
  /// level falls outside [1, depth()].
  std::vector<NodeId> nodes_at_level(const LevelSpec& level) const;
  std::vector<NodeId> nodes_at_depth(int depth) const;

  /// a is an ancestor of b, b of a, or a == b.
  bool hierarchically_related(NodeId a, NodeId b) const;

  /// All leaf topics, sorted.
  std::vector<Topic> topics() const;
  /// Leaf topics under a node path or topic prefix, sorted.
  std::vector<Topic> topics_with_prefix(std::string_view prefix) const;

 private:
  friend class TreeBuilder;

  std::vector<Node> nodes_;
  std::vector<Leaf> leaves_;
  std::unordered_map<std::string, NodeId> node_index_;
  std::unordered_map<std::string, std::size_t> leaf_index_;
  std::vector<std::vector<NodeId>> by_depth_;
  int max_depth_ = 0;
};

struct TopicRejection {
  std::string topic;
  std::string reason;
};

struct TreeBuildResult {
  SensorTree tree;
  std::vector<TopicRejection> rejected;
};

/// Builds a tree from raw topic strings. Without `spec`, slash segments are
/// levels. With it, the placement (text between the leading slash and the
/// final sensor segment) is consumed left to right, one anchored
/// longest-match per pattern; a single separating '/' after each match is
/// skipped; leftover text rejects the topic.
///
/// Rejected topics are reported and skipped. Throws Error(kEmptyTree) when no
/// topic is accepted.
TreeBuildResult build_tree(std::span<const std::string> topics,
                           const std::optional<HierarchySpec>& spec = std::nullopt);
TreeBuildResult build_tree(std::span<const Topic> topics,
                           const std::optional<HierarchySpec>& spec = std::nullopt);

/// Reads a topic dump: one topic per line, '#' starts a comment, blank lines
/// ignored, surrounding whitespace trimmed.
std::vector<std::string> read_topic_dump(std::istream& in);
void write_topic_dump(std::ostream& out, const SensorTree& tree);

}  // namespace oda
