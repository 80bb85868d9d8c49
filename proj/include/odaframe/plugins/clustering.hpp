// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <mutex>
#include <optional>

#include "odaframe/ops/operator.hpp"
#include "odaframe/plugins/gaussian_mixture.hpp"

namespace oda {

/// Groups blocks by their behaviour. Each block contributes one point, the
/// per-input averages over the aggregation window; one mixture is fitted
/// across all blocks and every block's label (or kOutlierLabel) is written to
/// its outputs.
///
/// Keys: max_components (8), concentration (1e-3), window_ms (3600000),
/// threshold (0.001), seed (1), refit (false: fit once, then only assign).
/// Actions: "reassign" recomputes every label now against the current model
/// (fitting first if there is none); "refit" discards the model and fits
/// again.
class ClusteringOperator : public Operator {
 public:
  explicit ClusteringOperator(OperatorConfig config);

  void compute_all(ComputeContext& ctx) override;
  /// Assigns one block against the current model; throws Error(kNotReady)
  /// before the first fit.
  void compute(const Block& block, ComputeContext& ctx) override;
  std::vector<std::string> custom_actions() const override { return {"reassign", "refit"}; }
  std::string custom_action(const std::string& action,
                            const std::map<std::string, std::string>& params,
                            ComputeContext& ctx) override;

  std::optional<MixtureModel> model() const;
  /// Latest point per block name.
  std::map<std::string, Eigen::VectorXd> points() const;
  std::map<std::string, int> labels() const;

 private:
  std::optional<Eigen::VectorXd> block_point(const Block& block, ComputeContext& ctx) const;

  GmmParams params_;
  Duration window_;
  double threshold_;
  bool refit_;

  mutable std::mutex mutex_;
  std::optional<MixtureModel> model_;
  std::map<std::string, Eigen::VectorXd> points_;
  std::map<std::string, int> labels_;
};

}  // namespace oda
