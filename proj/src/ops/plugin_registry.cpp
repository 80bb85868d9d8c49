// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/ops/plugin_registry.hpp"

namespace oda {

PluginRegistry& PluginRegistry::builtin() {
  static PluginRegistry* registry = [] {
    auto* r = new PluginRegistry();
    register_builtin_plugins(*r);
    return r;
  }();
  return *registry;
}

void PluginRegistry::add(PluginInfo info) {
  std::lock_guard lock(mutex_);
  auto name = info.name;
  plugins_[name] = std::move(info);
}

const PluginInfo* PluginRegistry::find(const std::string& name) const {
  std::lock_guard lock(mutex_);
  auto it = plugins_.find(name);
  return it == plugins_.end() ? nullptr : &it->second;
}

std::vector<std::string> PluginRegistry::names() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : plugins_) out.push_back(name);
  return out;
}

}  // namespace oda
