// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oda {

struct ForestParams {
  std::size_t trees = 32;
  std::size_t max_depth = 12;
  std::size_t min_samples_leaf = 1;
  /// Features tried per split; 0 means ceil(sqrt(d)).
  std::size_t feature_subset = 0;
  double bootstrap_ratio = 1.0;
  /// Training refuses smaller sets.
  std::size_t min_samples = 2;
  std::uint64_t seed = 1;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

/// Binary regression tree; samples with x[feature] <= threshold go left.
class RegressionTree {
 public:
  RegressionTree() = default;
  explicit RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t depth() const;

 private:
  std::vector<TreeNode> nodes_;
};

/// Bagged CART regression trees with per-split random feature subsets.
class RandomForest {
 public:
  explicit RandomForest(ForestParams params = {}) : params_(params) {}

  /// Assembles a forest from existing trees.
  static RandomForest from_trees(std::vector<RegressionTree> trees, std::size_t dimensions);

  /// Replaces any previous model. Deterministic given params.seed. Throws
  /// Error(kInvalidArgument) for too few samples or ragged rows.
  void train(const std::vector<std::vector<double>>& x, const std::vector<double>& y);

  /// Mean of the tree predictions. Throws Error(kNotReady) when untrained
  /// and Error(kInvalidArgument) on a dimensionality mismatch.
  double predict(std::span<const double> x) const;

  bool trained() const noexcept { return !trees_.empty(); }
  std::size_t dimensions() const noexcept { return dimensions_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }
  const ForestParams& params() const noexcept { return params_; }

 private:
  ForestParams params_;
  std::size_t dimensions_ = 0;
  std::vector<RegressionTree> trees_;
};

}  // namespace oda
