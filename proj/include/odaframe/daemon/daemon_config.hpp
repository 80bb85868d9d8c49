// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "odaframe/common/config_text.hpp"
#include "odaframe/sensor/topic.hpp"
#include "odaframe/tree/sensor_tree.hpp"

namespace oda {

enum class DaemonRole { kPusher, kCollector };

struct SourceConfig {
  /// tester | replay
  std::string type;
  ConfigNode params;

  friend bool operator==(const SourceConfig&, const SourceConfig&) = default;
};

struct PluginSection {
  std::string plugin;
  /// Plugin configuration text, as accepted by OperatorManager::load_plugin.
  std::string text;
  /// File line of the first text line, for diagnostics.
  std::size_t first_line = 1;

  friend bool operator==(const PluginSection& a, const PluginSection& b) {
    return a.plugin == b.plugin && a.text == b.text;
  }
};

struct DaemonConfig {
  DaemonRole role = DaemonRole::kPusher;
  /// Pusher: collector to publish to.
  std::string connect_host;
  std::uint16_t connect_port = 0;
  /// Collector: address for pusher and subscriber connections.
  std::string listen_host;
  std::uint16_t listen_port = 0;
  /// REST endpoint; port 0 disables it.
  std::string rest_host = "127.0.0.1";
  std::uint16_t rest_port = 0;
  Duration cache_capacity = 180 * kNsPerSec;
  Duration sampling_interval = kNsPerSec;
  std::size_t workers = 4;
  std::optional<std::vector<std::string>> hierarchy;
  std::vector<SourceConfig> sources;
  std::vector<PluginSection> plugins;
  /// Collector only.
  std::string store_dir;
  /// Collector only; JSON lines.
  std::string jobs_file;

  friend bool operator==(const DaemonConfig&, const DaemonConfig&) = default;
};

std::string_view to_string(DaemonRole role);

/// Parses and validates a daemon configuration. Errors are Error(kConfigError)
/// with messages "<origin>:<line>: <reason>".
DaemonConfig parse_daemon_config(std::string_view text, const std::string& origin = "<config>");
DaemonConfig load_daemon_config(const std::filesystem::path& path);
std::string serialize_daemon_config(const DaemonConfig& config);

/// Splits "host:port". Throws Error(kConfigError).
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text);

}  // namespace oda
