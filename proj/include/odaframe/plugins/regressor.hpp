// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <map>
#include <mutex>

#include "odaframe/ops/operator.hpp"
#include "odaframe/plugins/random_forest.hpp"

namespace oda {

/// Online regression of a target sensor's next-interval value.
///
/// Each tick builds a feature vector per block from the last
/// `window_intervals` intervals of every input. The previous tick's vector is
/// paired with the target's newest reading once that reading is one interval
/// younger; pairs from all blocks feed one shared training set. When the set
/// reaches `training_set_size` the forest trains once, and from then on every
/// tick writes a fixed-point prediction to the block outputs.
///
/// Keys: target (sensor name, default: first input), training_set_size
/// (30000), window_intervals (4), trees (32), max_depth (12),
/// min_samples_leaf (1), feature_subset (0 = ceil(sqrt(d))), bootstrap (1.0),
/// seed (1), min_train (10, for the "train" action).
class RegressorOperator : public Operator {
 public:
  explicit RegressorOperator(OperatorConfig config);

  void compute(const Block& block, ComputeContext& ctx) override;
  std::vector<std::string> custom_actions() const override { return {"train", "reset"}; }
  std::string custom_action(const std::string& action,
                            const std::map<std::string, std::string>& params,
                            ComputeContext& ctx) override;

  /// A response belongs to features whose newest target reading is at
  /// `feature_ts` when it arrives one interval later, within half an interval.
  static bool response_aligned(Timestamp feature_ts, Timestamp response_ts, Duration interval);

  std::size_t training_pairs() const;
  std::size_t misaligned() const noexcept { return misaligned_.load(); }
  bool model_ready() const;
  /// Copy of the current forest.
  RandomForest model() const;
  std::pair<double, double> response_range() const;

 private:
  struct Pending {
    std::vector<double> features;
    Timestamp target_ts = 0;
  };

  void train_locked();

  std::string target_;
  std::size_t training_set_size_;
  std::size_t window_intervals_;
  std::size_t min_train_;

  mutable std::mutex mutex_;
  std::map<std::string, Pending> pending_;
  std::vector<std::vector<double>> features_;
  std::vector<double> responses_;
  RandomForest forest_;
  double response_min_ = 0.0;
  double response_max_ = 0.0;
  std::atomic<std::size_t> misaligned_{0};
};

}  // namespace oda
