// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/daemon_config.hpp"

#include <fstream>
#include <sstream>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kConfigError, origin + ":" + std::to_string(line) + ": " + reason);
}

std::string endpoint_string(const std::string& host, std::uint16_t port) {
  return host + ":" + std::to_string(port);
}

}  // namespace

std::string_view to_string(DaemonRole role) {
  return role == DaemonRole::kPusher ? "pusher" : "collector";
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size())
    throw Error(ErrorCode::kConfigError, "expected host:port, got '" + text + "'");
  const std::string port_text = text.substr(colon + 1);
  std::size_t used = 0;
  unsigned long port = 0;
  try {
    port = std::stoul(port_text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != port_text.size() || port > 65535)
    throw Error(ErrorCode::kConfigError, "bad port in '" + text + "'");
  return {text.substr(0, colon), static_cast<std::uint16_t>(port)};
}

DaemonConfig parse_daemon_config(std::string_view text, const std::string& origin) {
  ConfigNode root;
  try {
    root = parse_config_text(text, {"plugin"});
  } catch (const ParseError& e) {
    fail(origin, e.line(), e.reason());
  }

  DaemonConfig cfg;
  const ConfigNode* role_node = nullptr;
  auto endpoint = [&](const ConfigNode& n) {
    try {
      return parse_endpoint(n.value);
    } catch (const Error& e) {
      fail(origin, n.line, e.what());
    }
  };
  auto integer = [&](const ConfigNode& n, std::int64_t min) {
    std::int64_t v = 0;
    std::size_t used = 0;
    try {
      v = std::stoll(n.value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != n.value.size() || v < min)
      fail(origin, n.line, "'" + n.key + "' needs an integer >= " + std::to_string(min));
    return v;
  };

  for (const auto& n : root.children) {
    if (n.key == "role") {
      role_node = &n;
      if (n.value == "pusher") cfg.role = DaemonRole::kPusher;
      else if (n.value == "collector") cfg.role = DaemonRole::kCollector;
      else fail(origin, n.line, "role must be pusher or collector");
    } else if (n.key == "connect") {
      std::tie(cfg.connect_host, cfg.connect_port) = endpoint(n);
    } else if (n.key == "listen") {
      std::tie(cfg.listen_host, cfg.listen_port) = endpoint(n);
    } else if (n.key == "rest") {
      std::tie(cfg.rest_host, cfg.rest_port) = endpoint(n);
    } else if (n.key == "cache_seconds") {
      cfg.cache_capacity = static_cast<Duration>(integer(n, 1)) * kNsPerSec;
    } else if (n.key == "interval_ms") {
      cfg.sampling_interval = static_cast<Duration>(integer(n, 1)) * kNsPerMs;
    } else if (n.key == "workers") {
      cfg.workers = static_cast<std::size_t>(integer(n, 1));
    } else if (n.key == "store_dir") {
      cfg.store_dir = n.value;
    } else if (n.key == "jobs_file") {
      cfg.jobs_file = n.value;
    } else if (n.key == "hierarchy" && n.is_section) {
      std::vector<std::string> levels;
      for (const auto& l : n.children) {
        if (l.key != "level" || l.is_section) fail(origin, l.line, "hierarchy takes 'level PATTERN' entries");
        levels.push_back(l.value);
      }
      if (levels.empty()) fail(origin, n.line, "hierarchy has no levels");
      cfg.hierarchy = std::move(levels);
    } else if (n.key == "source" && n.is_section) {
      if (n.value != "tester" && n.value != "replay")
        fail(origin, n.line, "unknown source type '" + n.value + "'");
      cfg.sources.push_back({n.value, n});
    } else if (n.key == "plugin" && n.is_section) {
      if (n.value.empty()) fail(origin, n.line, "plugin section needs a name");
      cfg.plugins.push_back({n.value, n.raw.value_or(""), n.raw_line});
    } else {
      fail(origin, n.line, "unknown entry '" + n.key + "'");
    }
  }

  if (!role_node) fail(origin, 1, "missing 'role'");
  if (cfg.role == DaemonRole::kPusher) {
    if (cfg.connect_host.empty()) fail(origin, role_node->line, "pusher needs 'connect host:port'");
  } else {
    if (cfg.listen_host.empty()) fail(origin, role_node->line, "collector needs 'listen host:port'");
    if (cfg.store_dir.empty()) fail(origin, role_node->line, "collector needs 'store_dir'");
    if (!cfg.sources.empty()) fail(origin, role_node->line, "collectors have no sources");
  }
  return cfg;
}

DaemonConfig load_daemon_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, path.string() + ":0: cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_daemon_config(ss.str(), path.string());
}

std::string serialize_daemon_config(const DaemonConfig& cfg) {
  ConfigNode root;
  root.is_section = true;
  root.set("role", std::string(to_string(cfg.role)));
  if (!cfg.connect_host.empty()) root.set("connect", endpoint_string(cfg.connect_host, cfg.connect_port));
  if (!cfg.listen_host.empty()) root.set("listen", endpoint_string(cfg.listen_host, cfg.listen_port));
  root.set("rest", endpoint_string(cfg.rest_host, cfg.rest_port));
  root.set("cache_seconds", std::to_string(cfg.cache_capacity / kNsPerSec));
  root.set("interval_ms", std::to_string(cfg.sampling_interval / kNsPerMs));
  root.set("workers", std::to_string(cfg.workers));
  if (!cfg.store_dir.empty()) root.set("store_dir", cfg.store_dir);
  if (!cfg.jobs_file.empty()) root.set("jobs_file", cfg.jobs_file);
  if (cfg.hierarchy) {
    ConfigNode h;
    h.key = "hierarchy";
    h.is_section = true;
    for (const auto& l : *cfg.hierarchy) {
      ConfigNode level;
      level.key = "level";
      level.value = l;
      h.children.push_back(std::move(level));
    }
    root.children.push_back(std::move(h));
  }
  for (const auto& s : cfg.sources) {
    ConfigNode node = s.params;
    node.key = "source";
    node.value = s.type;
    node.is_section = true;
    root.children.push_back(std::move(node));
  }
  for (const auto& p : cfg.plugins) {
    ConfigNode node;
    node.key = "plugin";
    node.value = p.plugin;
    node.is_section = true;
    node.raw = p.text;
    if (!node.raw->empty() && node.raw->back() != '\n') *node.raw += '\n';
    root.children.push_back(std::move(node));
  }
  return serialize_config(root);
}

}  // namespace oda
