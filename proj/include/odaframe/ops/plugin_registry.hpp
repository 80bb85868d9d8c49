// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "odaframe/ops/operator.hpp"

namespace oda {

using OperatorFactory = std::function<std::unique_ptr<Operator>(const OperatorConfig&)>;

struct PluginInfo {
  std::string name;
  OperatorFactory factory;
  std::string description;
};

/// Compiled-in operator plugins, selected by name.
class PluginRegistry {
 public:
  /// Registry pre-populated with the built-in plugins.
  static PluginRegistry& builtin();

  void add(PluginInfo info);
  const PluginInfo* find(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, PluginInfo> plugins_;
};

/// Registers regressor, perfmetrics, persyst, clustering, querytest, identity
/// and actuator.
void register_builtin_plugins(PluginRegistry& registry);

}  // namespace oda
