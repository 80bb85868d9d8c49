// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "odaframe/common/error.hpp"

namespace oda {

double RegressionTree::predict(std::span<const double> x) const {
  if (nodes_.empty()) throw Error(ErrorCode::kNotReady, "empty regression tree");
  std::size_t i = 0;
  while (nodes_[i].feature >= 0) {
    const auto& n = nodes_[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                         : n.right);
  }
  return nodes_[i].value;
}

std::size_t RegressionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const auto& n = nodes_[static_cast<std::size_t>(i)];
    if (n.feature >= 0) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return deepest;
}

namespace {

class TreeGrower {
 public:
  TreeGrower(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
             const ForestParams& params, std::size_t mtry, std::mt19937_64& rng)
      : x_(x), y_(y), params_(params), mtry_(mtry), rng_(rng) {
    features_.resize(x.front().size());
    std::iota(features_.begin(), features_.end(), 0);
  }

  RegressionTree grow(std::vector<std::size_t> samples) {
    nodes_.clear();
    build(samples, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double score = 0.0;
  };

  int build(std::vector<std::size_t>& samples, std::size_t depth) {
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    double sum = 0.0;
    for (auto s : samples) sum += y_[s];
    double mean = sum / static_cast<double>(samples.size());
    nodes_[static_cast<std::size_t>(id)].value = mean;

    bool constant = std::all_of(samples.begin(), samples.end(),
                                [&](std::size_t s) { return y_[s] == y_[samples.front()]; });
    if (constant || depth >= params_.max_depth ||
        samples.size() < 2 * std::max<std::size_t>(params_.min_samples_leaf, 1))
      return id;

    Split best = find_split(samples, sum);
    if (best.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples) {
      (x_[s][static_cast<std::size_t>(best.feature)] <= best.threshold ? left : right).push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    int l = build(left, depth + 1);
    int r = build(right, depth + 1);
    auto& node = nodes_[static_cast<std::size_t>(id)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  Split find_split(const std::vector<std::size_t>& samples, double total) {
    // Partial Fisher-Yates over the feature list; continue past mtry only
    // while no valid split has been found.
    Split best;
    const std::size_t min_leaf = std::max<std::size_t>(params_.min_samples_leaf, 1);
    const double n = static_cast<double>(samples.size());
    const double base = total * total / n;
    std::vector<std::pair<double, double>> column(samples.size());

    for (std::size_t k = 0; k < features_.size(); ++k) {
      if (k >= mtry_ && best.feature >= 0) break;
      std::uniform_int_distribution<std::size_t> pick(k, features_.size() - 1);
      std::swap(features_[k], features_[pick(rng_)]);
      std::size_t f = features_[k];

      for (std::size_t i = 0; i < samples.size(); ++i) column[i] = {x_[samples[i]][f], y_[samples[i]]};
      std::sort(column.begin(), column.end());
      double left_sum = 0.0;
      for (std::size_t i = 0; i + 1 < column.size(); ++i) {
        left_sum += column[i].second;
        std::size_t nl = i + 1;
        std::size_t nr = column.size() - nl;
        if (nl < min_leaf) continue;
        if (nr < min_leaf) break;
        if (column[i].first == column[i + 1].first) continue;
        double right_sum = total - left_sum;
        double score = left_sum * left_sum / static_cast<double>(nl) +
                       right_sum * right_sum / static_cast<double>(nr) - base;
        if (best.feature < 0 || score > best.score) {
          double mid = column[i].first + (column[i + 1].first - column[i].first) / 2.0;
          if (!(mid < column[i + 1].first)) mid = column[i].first;
          best = {static_cast<int>(f), mid, score};
        }
      }
    }
    return best;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<double>& y_;
  const ForestParams& params_;
  std::size_t mtry_;
  std::mt19937_64& rng_;
  std::vector<std::size_t> features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

RandomForest RandomForest::from_trees(std::vector<RegressionTree> trees, std::size_t dimensions) {
  RandomForest f;
  f.params_.trees = trees.size();
  f.trees_ = std::move(trees);
  f.dimensions_ = dimensions;
  return f;
}

void RandomForest::train(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::kInvalidArgument, "feature and response counts differ");
  if (x.size() < std::max<std::size_t>(params_.min_samples, 1))
    throw Error(ErrorCode::kInvalidArgument,
                "need at least " + std::to_string(params_.min_samples) + " samples, got " +
                    std::to_string(x.size()));
  const std::size_t d = x.front().size();
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "zero-dimensional features");
  for (const auto& row : x) {
    if (row.size() != d) throw Error(ErrorCode::kInvalidArgument, "ragged feature rows");
    for (double v : row)
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite feature");
  }
  if (params_.trees == 0) throw Error(ErrorCode::kInvalidArgument, "forest needs at least one tree");

  std::size_t mtry = params_.feature_subset;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  mtry = std::clamp<std::size_t>(mtry, 1, d);
  std::size_t draws = static_cast<std::size_t>(
      std::llround(params_.bootstrap_ratio * static_cast<double>(x.size())));
  draws = std::max<std::size_t>(draws, 1);

  std::mt19937_64 rng(params_.seed);
  std::vector<RegressionTree> trees;
  trees.reserve(params_.trees);
  TreeGrower grower(x, y, params_, mtry, rng);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  for (std::size_t t = 0; t < params_.trees; ++t) {
    std::vector<std::size_t> samples(draws);
    for (auto& s : samples) s = pick(rng);
    trees.push_back(grower.grow(std::move(samples)));
  }
  trees_ = std::move(trees);
  dimensions_ = d;
}

double RandomForest::predict(std::span<const double> x) const {
  if (!trained()) throw Error(ErrorCode::kNotReady, "random forest is not trained");
  if (x.size() != dimensions_)
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(dimensions_) +
                                                 " features, got " + std::to_string(x.size()));
  double sum = 0.0;
  for (const auto& t : trees_) sum += t.predict(x);
  return sum / static_cast<double>(trees_.size());
}

}  // namespace oda
