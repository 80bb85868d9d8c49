// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/ops/plugin_registry.hpp"
#include "odaframe/plugins/actuator.hpp"
#include "odaframe/plugins/clustering.hpp"
#include "odaframe/plugins/identity.hpp"
#include "odaframe/plugins/perfmetrics.hpp"
#include "odaframe/plugins/persyst.hpp"
#include "odaframe/plugins/querytest.hpp"
#include "odaframe/plugins/regressor.hpp"

namespace oda {

namespace {

template <typename T>
OperatorFactory factory() {
  return [](const OperatorConfig& cfg) { return std::make_unique<T>(cfg); };
}

}  // namespace

void register_builtin_plugins(PluginRegistry& registry) {
  registry.add({"regressor", factory<RegressorOperator>(), "random-forest next-interval regression"});
  registry.add({"perfmetrics", factory<PerfmetricsOperator>(), "derived counter metrics"});
  registry.add({"persyst", factory<PersystOperator>(), "job-level deciles"});
  registry.add({"clustering", factory<ClusteringOperator>(), "Bayesian Gaussian mixture labels"});
  registry.add({"querytest", factory<QuerytestOperator>(), "query load generator"});
  registry.add({"identity", factory<IdentityOperator>(), "echoes inputs"});
  registry.add({"actuator", factory<ActuatorOperator>(), "logs intended knob settings"});
}

}  // namespace oda
