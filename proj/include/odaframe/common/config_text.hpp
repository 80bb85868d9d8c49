// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace oda {

/// One entry of a nested key-value configuration file.
///
///   # comment
///   key value with spaces
///   section label {
///       nested 1
///   }
///   template {
///       input:
///           <topdown+1>power
///   }
///
/// Everything after the key is the value (surrounding double quotes are
/// stripped). Sections listed as raw keep their body verbatim in `raw`; nested
/// braces inside a raw body are balanced, not parsed.
struct ConfigNode {
  std::string key;
  std::string value;
  std::vector<ConfigNode> children;
  bool is_section = false;
  std::optional<std::string> raw;
  std::size_t line = 0;
  /// Line of the first body line of a raw section.
  std::size_t raw_line = 0;

  const ConfigNode* child(std::string_view name) const;
  std::vector<const ConfigNode*> children_named(std::string_view name) const;

  std::optional<std::string> get(std::string_view name) const;
  std::string get_or(std::string_view name, std::string fallback) const;
  /// Throw ParseError (pointing at the entry) on malformed numbers.
  std::int64_t get_int(std::string_view name, std::int64_t fallback) const;
  double get_double(std::string_view name, double fallback) const;
  bool get_bool(std::string_view name, bool fallback) const;

  void set(std::string name, std::string value);

  friend bool operator==(const ConfigNode& a, const ConfigNode& b) {
    return a.key == b.key && a.value == b.value && a.children == b.children &&
           a.is_section == b.is_section && a.raw == b.raw;
  }
};

/// Throws ParseError with 1-based line numbers.
ConfigNode parse_config_text(std::string_view text,
                             const std::set<std::string, std::less<>>& raw_sections = {"template"});

std::string serialize_config(const ConfigNode& root);

}  // namespace oda
