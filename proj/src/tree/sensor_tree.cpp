// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/tree/sensor_tree.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <regex>

#include "odaframe/common/error.hpp"

namespace oda {

std::string LevelSpec::to_string() const {
  std::string out = anchor == Anchor::kTopDown ? "topdown" : "bottomup";
  if (offset > 0) {
    out += "+" + std::to_string(offset);
  } else if (offset < 0) {
    out += std::to_string(offset);
  }
  return out;
}

SensorTree::SensorTree() {
  nodes_.push_back(Node{"/", "", 0, kRoot, {}, {}});
  node_index_.emplace("/", kRoot);
}

std::optional<NodeId> SensorTree::find_node(std::string_view path) const {
  auto it = node_index_.find(std::string(path));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

const SensorTree::Leaf* SensorTree::find_leaf(std::string_view topic) const {
  auto it = leaf_index_.find(std::string(topic));
  return it == leaf_index_.end() ? nullptr : &leaves_[it->second];
}

std::vector<NodeId> SensorTree::nodes_at_depth(int depth) const {
  if (depth < 1 || depth > max_depth_) return {};
  return by_depth_[static_cast<std::size_t>(depth)];
}

std::vector<NodeId> SensorTree::nodes_at_level(const LevelSpec& level) const {
  return nodes_at_depth(level.resolve(max_depth_));
}

bool SensorTree::hierarchically_related(NodeId a, NodeId b) const {
  if (a == b) return true;
  if (nodes_.at(a).depth > nodes_.at(b).depth) std::swap(a, b);
  // a is now the shallower one; walk b up to a's depth.
  while (nodes_[b].depth > nodes_[a].depth) b = nodes_[b].parent;
  return a == b;
}

std::vector<Topic> SensorTree::topics() const {
  std::vector<Topic> out;
  out.reserve(leaves_.size());
  for (const auto& leaf : leaves_) out.push_back(leaf.topic);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Topic> SensorTree::topics_with_prefix(std::string_view prefix) const {
  std::vector<Topic> out;
  for (const auto& leaf : leaves_) {
    if (topic_has_prefix(leaf.topic.str(), prefix)) out.push_back(leaf.topic);
  }
  std::sort(out.begin(), out.end());
  return out;
}

class TreeBuilder {
 public:
  explicit TreeBuilder(const std::optional<HierarchySpec>& spec) {
    if (!spec) return;
    if (spec->level_patterns.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "hierarchy spec has no levels");
    }
    for (const auto& pattern : spec->level_patterns) {
      try {
        patterns_.emplace_back(pattern);
      } catch (const std::regex_error& e) {
        throw Error(ErrorCode::kInvalidArgument,
                    "invalid hierarchy pattern '" + pattern + "': " + e.what());
      }
    }
  }

  /// Returns a rejection reason, or empty on success.
  std::string add(const std::string& raw) {
    if (!Topic::is_valid(raw)) return "malformed topic";
    Topic topic(raw);
    if (tree_.leaf_index_.count(raw)) return {};

    std::vector<std::string> levels;
    std::string reason = segment(topic, levels);
    if (!reason.empty()) return reason;

    NodeId current = SensorTree::kRoot;
    std::string path = "/";
    for (const auto& name : levels) {
      path += name;
      path += '/';
      current = child(current, name, path);
    }
    const std::size_t leaf_id = tree_.leaves_.size();
    tree_.leaves_.push_back({topic, std::string(topic.name()), current});
    tree_.leaf_index_.emplace(raw, leaf_id);
    tree_.nodes_[current].leaves.push_back(leaf_id);
    return {};
  }

  SensorTree finish() && {
    for (auto& level : tree_.by_depth_) {
      std::sort(level.begin(), level.end(), [this](NodeId a, NodeId b) {
        return tree_.nodes_[a].path < tree_.nodes_[b].path;
      });
    }
    return std::move(tree_);
  }

 private:
  std::string segment(const Topic& topic, std::vector<std::string>& levels) const {
    const std::string_view parent = topic.parent_path();
    // Strip leading and trailing slash of the placement.
    std::string_view rest =
        parent.size() <= 1 ? std::string_view{} : parent.substr(1, parent.size() - 2);
    if (patterns_.empty()) {
      while (!rest.empty()) {
        auto slash = rest.find('/');
        levels.emplace_back(rest.substr(0, slash));
        rest = slash == std::string_view::npos ? std::string_view{} : rest.substr(slash + 1);
      }
      return {};
    }
    for (std::size_t level = 0; level < patterns_.size() && !rest.empty(); ++level) {
      std::size_t matched = 0;
      for (std::size_t len = rest.size(); len > 0; --len) {
        if (std::regex_match(rest.begin(), rest.begin() + static_cast<long>(len),
                             patterns_[level])) {
          matched = len;
          break;
        }
      }
      if (matched == 0) {
        return "level " + std::to_string(level + 1) + " pattern does not match '" +
               std::string(rest) + "'";
      }
      std::string_view name = rest.substr(0, matched);
      while (!name.empty() && name.back() == '/') name.remove_suffix(1);
      if (name.empty() || name.find('/') != std::string_view::npos) {
        return "level " + std::to_string(level + 1) + " match is not a single segment";
      }
      levels.emplace_back(name);
      rest.remove_prefix(matched);
      if (!rest.empty() && rest.front() == '/') rest.remove_prefix(1);
    }
    if (!rest.empty()) return "unmatched residue '" + std::string(rest) + "'";
    return {};
  }

  NodeId child(NodeId parent, const std::string& name, const std::string& path) {
    if (auto it = tree_.node_index_.find(path); it != tree_.node_index_.end()) {
      return it->second;
    }
    const NodeId id = tree_.nodes_.size();
    const int depth = tree_.nodes_[parent].depth + 1;
    tree_.nodes_.push_back({path, name, depth, parent, {}, {}});
    tree_.nodes_[parent].children.push_back(id);
    tree_.node_index_.emplace(path, id);
    if (tree_.by_depth_.size() <= static_cast<std::size_t>(depth)) {
      tree_.by_depth_.resize(static_cast<std::size_t>(depth) + 1);
    }
    tree_.by_depth_[static_cast<std::size_t>(depth)].push_back(id);
    tree_.max_depth_ = std::max(tree_.max_depth_, depth);
    return id;
  }

  SensorTree tree_;
  std::vector<std::regex> patterns_;
};

TreeBuildResult build_tree(std::span<const std::string> topics,
                           const std::optional<HierarchySpec>& spec) {
  TreeBuilder builder(spec);
  std::vector<TopicRejection> rejected;
  for (const auto& topic : topics) {
    if (auto reason = builder.add(topic); !reason.empty()) {
      rejected.push_back({topic, std::move(reason)});
    }
  }
  SensorTree tree = std::move(builder).finish();
  if (tree.empty()) {
    std::string message = "no topics accepted";
    if (!rejected.empty()) {
      message += " (" + std::to_string(rejected.size()) + " rejected, first: '" +
                 rejected.front().topic + "': " + rejected.front().reason + ")";
    }
    throw Error(ErrorCode::kEmptyTree, message);
  }
  return {std::move(tree), std::move(rejected)};
}

TreeBuildResult build_tree(std::span<const Topic> topics,
                           const std::optional<HierarchySpec>& spec) {
  std::vector<std::string> raw;
  raw.reserve(topics.size());
  for (const auto& t : topics) raw.push_back(t.str());
  return build_tree(std::span<const std::string>(raw), spec);
}

std::vector<std::string> read_topic_dump(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(first, last - first + 1));
  }
  return out;
}

void write_topic_dump(std::ostream& out, const SensorTree& tree) {
  for (const auto& topic : tree.topics()) out << topic.str() << '\n';
}

}  // namespace oda
