// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/plugins/regressor.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "odaframe/common/error.hpp"
#include "odaframe/plugins/features.hpp"

namespace oda {

namespace {

ForestParams forest_params(const ConfigNode& p) {
  ForestParams f;
  f.trees = static_cast<std::size_t>(p.get_int("trees", 32));
  f.max_depth = static_cast<std::size_t>(p.get_int("max_depth", 12));
  f.min_samples_leaf = static_cast<std::size_t>(p.get_int("min_samples_leaf", 1));
  f.feature_subset = static_cast<std::size_t>(p.get_int("feature_subset", 0));
  f.bootstrap_ratio = p.get_double("bootstrap", 1.0);
  f.seed = static_cast<std::uint64_t>(p.get_int("seed", 1));
  f.min_samples = static_cast<std::size_t>(p.get_int("min_train", 10));
  return f;
}

}  // namespace

RegressorOperator::RegressorOperator(OperatorConfig config)
    : Operator(std::move(config)),
      target_(this->config().params.get_or("target", "")),
      training_set_size_(static_cast<std::size_t>(
          std::max<std::int64_t>(this->config().params.get_int("training_set_size", 30000), 1))),
      window_intervals_(static_cast<std::size_t>(
          std::max<std::int64_t>(this->config().params.get_int("window_intervals", 4), 1))),
      min_train_(static_cast<std::size_t>(this->config().params.get_int("min_train", 10))),
      forest_(forest_params(this->config().params)) {
  if (target_.empty() && !this->config().block_template.inputs.empty())
    target_ = this->config().block_template.inputs.front().sensor_name;
}

bool RegressorOperator::response_aligned(Timestamp feature_ts, Timestamp response_ts,
                                         Duration interval) {
  const Timestamp expected = feature_ts + interval;
  const Timestamp diff = response_ts > expected ? response_ts - expected : expected - response_ts;
  return response_ts > feature_ts && 2 * diff <= interval;
}

void RegressorOperator::compute(const Block& block, ComputeContext& ctx) {
  const Duration interval = config().interval_ns;
  std::size_t target_index = block.input_topics.size();
  std::vector<std::vector<SensorReading>> windows;
  windows.reserve(block.input_topics.size());
  for (std::size_t i = 0; i < block.input_topics.size(); ++i) {
    const auto& topic = block.input_topics[i];
    if (target_index == block.input_topics.size() && topic.name() == target_) target_index = i;
    windows.push_back(ctx.query_relative(topic, window_intervals_ * interval));
  }
  if (target_index == block.input_topics.size())
    throw Error(ErrorCode::kInvalidArgument, "block has no target sensor '" + target_ + "'");

  auto features = feature_vector(windows);
  if (!features) return;
  const SensorReading target = windows[target_index].back();

  std::lock_guard lock(mutex_);
  auto it = pending_.find(block.name);
  if (it != pending_.end() && !forest_.trained() && target.timestamp != it->second.target_ts) {
    if (response_aligned(it->second.target_ts, target.timestamp, interval)) {
      double y = static_cast<double>(target.value);
      if (responses_.empty()) response_min_ = response_max_ = y;
      response_min_ = std::min(response_min_, y);
      response_max_ = std::max(response_max_, y);
      features_.push_back(std::move(it->second.features));
      responses_.push_back(y);
    } else {
      misaligned_.fetch_add(1);
    }
  }
  pending_[block.name] = {*features, target.timestamp};

  if (!forest_.trained() && responses_.size() >= training_set_size_) train_locked();
  if (!forest_.trained()) return;

  const std::int64_t prediction = to_fixed_point(forest_.predict(*features));
  for (const auto& out : block.output_topics) ctx.emit(out, prediction);
}

void RegressorOperator::train_locked() {
  forest_.train(features_, responses_);
  spdlog::info("operator {}: trained on {} samples", name(), responses_.size());
  features_.clear();
  features_.shrink_to_fit();
  responses_.clear();
  responses_.shrink_to_fit();
}

std::string RegressorOperator::custom_action(const std::string& action,
                                             const std::map<std::string, std::string>& params,
                                             ComputeContext& ctx) {
  std::lock_guard lock(mutex_);
  if (action == "train") {
    if (responses_.size() < std::max<std::size_t>(min_train_, 1)) {
      if (forest_.trained()) return "trained";
      throw Error(ErrorCode::kNotReady, "need " + std::to_string(min_train_) +
                                            " samples to train, have " +
                                            std::to_string(responses_.size()));
    }
    train_locked();
    return "trained";
  }
  if (action == "reset") {
    forest_ = RandomForest(forest_.params());
    features_.clear();
    responses_.clear();
    pending_.clear();
    return "reset";
  }
  return Operator::custom_action(action, params, ctx);
}

std::size_t RegressorOperator::training_pairs() const {
  std::lock_guard lock(mutex_);
  return responses_.size();
}

bool RegressorOperator::model_ready() const {
  std::lock_guard lock(mutex_);
  return forest_.trained();
}

RandomForest RegressorOperator::model() const {
  std::lock_guard lock(mutex_);
  return forest_;
}

std::pair<double, double> RegressorOperator::response_range() const {
  std::lock_guard lock(mutex_);
  return {response_min_, response_max_};
}

}  // namespace oda
