// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <set>

#include "odaframe/common/error.hpp"
#include "odaframe/ops/operator.hpp"

namespace oda {

std::string_view to_string(OperatorMode mode) {
  return mode == OperatorMode::kOnline ? "online" : "on-demand";
}

std::string_view to_string(Arrangement arrangement) {
  return arrangement == Arrangement::kSequential ? "sequential" : "parallel";
}

std::string_view to_string(OperatorState state) {
  return state == OperatorState::kRunning ? "running" : "stopped";
}

std::int64_t to_fixed_point(double value) {
  return static_cast<std::int64_t>(std::llround(value * kFixedPointScale));
}

double from_fixed_point(std::int64_t value) {
  return static_cast<double>(value) / kFixedPointScale;
}

namespace {

ConfigNode merged_section(const ConfigNode& section, const ConfigNode* defaults) {
  ConfigNode merged = section;
  if (!defaults) return merged;
  for (const auto& d : defaults->children) {
    if (!merged.child(d.key)) merged.children.push_back(d);
  }
  return merged;
}

}  // namespace

OperatorConfig parse_operator_config(const ConfigNode& section, const std::string& plugin,
                                     const ConfigNode* defaults) {
  const ConfigNode node = merged_section(section, defaults);
  OperatorConfig cfg;
  cfg.plugin = plugin;
  cfg.name = node.value;
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) {
    throw ParseError(node.line, 1, "operator needs a name without '/'");
  }

  const std::string mode = node.get_or("mode", "online");
  if (mode == "online") {
    cfg.mode = OperatorMode::kOnline;
  } else if (mode == "on-demand" || mode == "ondemand") {
    cfg.mode = OperatorMode::kOnDemand;
  } else {
    throw ParseError(node.child("mode")->line, 1, "unknown mode '" + mode + "'");
  }

  const std::int64_t interval_ms = node.get_int("interval_ms", 1000);
  if (cfg.mode == OperatorMode::kOnline && interval_ms <= 0) {
    throw ParseError(node.child("interval_ms")->line, 1, "interval_ms must be positive");
  }
  cfg.interval_ns = static_cast<Duration>(std::max<std::int64_t>(interval_ms, 1)) * kNsPerMs;

  const std::string arrangement = node.get_or("arrangement", "sequential");
  if (arrangement == "sequential") {
    cfg.arrangement = Arrangement::kSequential;
  } else if (arrangement == "parallel") {
    cfg.arrangement = Arrangement::kParallel;
  } else {
    throw ParseError(node.child("arrangement")->line, 1,
                     "unknown arrangement '" + arrangement + "'");
  }

  cfg.streaming = node.get_bool("streaming", true);
  cfg.job_output_prefix = node.get_or("job_output_prefix", "/jobs");
  cfg.operator_output_prefix = node.get_or("operator_output_prefix", "/oda/" + cfg.name);

  const auto* tmpl = node.child("template");
  if (!tmpl || !tmpl->raw) {
    throw ParseError(node.line, 1, "operator '" + cfg.name + "' has no template section");
  }
  cfg.block_template = parse_template(*tmpl->raw, tmpl->raw_line);
  cfg.params = node;
  return cfg;
}

std::vector<OperatorConfig> parse_plugin_config(std::string_view text, const std::string& plugin) {
  const ConfigNode root = parse_config_text(text);
  const ConfigNode* defaults = root.child("defaults");
  std::vector<OperatorConfig> out;
  std::set<std::string> names;
  for (const auto& c : root.children) {
    if (c.key == "defaults") continue;
    if (c.key != "operator" || !c.is_section) {
      throw ParseError(c.line, 1, "expected 'operator NAME {' or 'defaults {', got '" + c.key + "'");
    }
    auto cfg = parse_operator_config(c, plugin, defaults);
    if (!names.insert(cfg.name).second) {
      throw ParseError(c.line, 1, "duplicate operator name '" + cfg.name + "'");
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

ConfigNode operator_config_to_node(const OperatorConfig& config) {
  ConfigNode node = config.params;
  node.key = "operator";
  node.value = config.name;
  node.is_section = true;
  node.set("mode", std::string(to_string(config.mode)));
  node.set("interval_ms", std::to_string(config.interval_ns / kNsPerMs));
  node.set("arrangement", std::string(to_string(config.arrangement)));
  node.set("streaming", config.streaming ? "true" : "false");
  for (auto& c : node.children) {
    if (c.key == "template") c.raw = config.block_template.to_string();
  }
  if (!node.child("template")) {
    ConfigNode t;
    t.key = "template";
    t.is_section = true;
    t.raw = config.block_template.to_string();
    node.children.push_back(std::move(t));
  }
  return node;
}

}  // namespace oda
