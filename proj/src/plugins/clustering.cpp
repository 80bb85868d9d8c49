// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/clustering.hpp"

#include <spdlog/spdlog.h>

#include "odaframe/common/error.hpp"

namespace oda {

ClusteringOperator::ClusteringOperator(OperatorConfig config) : Operator(std::move(config)) {
  const auto& p = this->config().params;
  params_.max_components = static_cast<std::size_t>(std::max<std::int64_t>(p.get_int("max_components", 8), 1));
  params_.concentration = p.get_double("concentration", 1e-3);
  params_.covariance_prior_scale = p.get_double("covariance_prior_scale", 1.0);
  if (!(params_.covariance_prior_scale > 0.0))
    throw Error(ErrorCode::kConfigError, "covariance_prior_scale must be positive");
  params_.mean_precision_prior = p.get_double("mean_precision_prior", 1.0);
  if (!(params_.mean_precision_prior > 0.0))
    throw Error(ErrorCode::kConfigError, "mean_precision_prior must be positive");
  params_.seed = static_cast<std::uint64_t>(p.get_int("seed", 1));
  params_.max_iterations = static_cast<std::size_t>(p.get_int("max_iterations", 1000));
  window_ = static_cast<Duration>(std::max<std::int64_t>(p.get_int("window_ms", 3600000), 1)) * kNsPerMs;
  threshold_ = p.get_double("threshold", 0.001);
  refit_ = p.get_bool("refit", false);
}

std::optional<Eigen::VectorXd> ClusteringOperator::block_point(const Block& block,
                                                               ComputeContext& ctx) const {
  Eigen::VectorXd point(static_cast<Eigen::Index>(block.input_topics.size()));
  for (std::size_t i = 0; i < block.input_topics.size(); ++i) {
    const auto window = ctx.query_relative(block.input_topics[i], window_);
    if (window.empty()) return std::nullopt;
    double sum = 0.0;
    for (const auto& r : window) sum += static_cast<double>(r.value);
    point(static_cast<Eigen::Index>(i)) = sum / static_cast<double>(window.size());
  }
  return point;
}

void ClusteringOperator::compute_all(ComputeContext& ctx) {
  std::vector<const Block*> present;
  std::vector<Eigen::VectorXd> pts;
  for (const auto& block : blocks()) {
    try {
      if (auto p = block_point(block, ctx)) {
        present.push_back(&block);
        pts.push_back(std::move(*p));
      }
    } catch (const std::exception& e) {
      count_failure();
      spdlog::warn("operator {}: block {} failed: {}", name(), block.name, e.what());
    }
  }

  std::lock_guard lock(mutex_);
  for (std::size_t i = 0; i < present.size(); ++i) points_[present[i]->name] = pts[i];
  if (!model_ || refit_) {
    if (pts.size() < params_.max_components) {
      spdlog::debug("operator {}: {} points, waiting for {}", name(), pts.size(), params_.max_components);
      return;
    }
    model_ = fit_gmm(pts, params_);
    spdlog::info("operator {}: fitted {} component(s) on {} points", name(), model_->size(), pts.size());
  }
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (static_cast<std::size_t>(pts[i].size()) != model_->dimensions()) continue;
    const int label = model_->assign(pts[i], threshold_);
    labels_[present[i]->name] = label;
    for (const auto& out : present[i]->output_topics) ctx.emit(out, label);
  }
}

void ClusteringOperator::compute(const Block& block, ComputeContext& ctx) {
  auto point = block_point(block, ctx);
  if (!point) return;
  std::lock_guard lock(mutex_);
  if (!model_) throw Error(ErrorCode::kNotReady, "clustering model is not fitted yet");
  const int label = model_->assign(*point, threshold_);
  for (const auto& out : block.output_topics) ctx.emit(out, label);
}

std::string ClusteringOperator::custom_action(const std::string& action,
                                              const std::map<std::string, std::string>& params,
                                              ComputeContext& ctx) {
  if (action != "refit" && action != "reassign") return Operator::custom_action(action, params, ctx);
  if (action == "refit") {
    std::lock_guard lock(mutex_);
    model_.reset();
  }
  compute_all(ctx);
  std::lock_guard lock(mutex_);
  if (!model_) throw Error(ErrorCode::kNotReady, "not enough points to fit");
  if (action == "reassign") return "reassigned " + std::to_string(labels_.size()) + " blocks";
  return "fitted " + std::to_string(model_->size()) + " components";
}

std::optional<MixtureModel> ClusteringOperator::model() const {
  std::lock_guard lock(mutex_);
  return model_;
}

std::map<std::string, Eigen::VectorXd> ClusteringOperator::points() const {
  std::lock_guard lock(mutex_);
  return points_;
}

std::map<std::string, int> ClusteringOperator::labels() const {
  std::lock_guard lock(mutex_);
  return labels_;
}

}  // namespace oda
