// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odaframe/tree/sensor_tree.hpp"

namespace oda {

/// Generic sensor reference: a tree level (vertical navigation), an optional
/// regex filter on node paths (horizontal navigation) and the sensor name.
///
///   <topdown+1>power
///   <bottomup, filter cpu>cpu-cycles
struct SensorExpression {
  LevelSpec level;
  std::optional<std::string> filter;
  std::string sensor_name;

  std::string to_string() const;

  friend bool operator==(const SensorExpression&, const SensorExpression&) = default;
};

/// Parses "<LEVEL[, filter REGEX]>NAME". Throws ParseError with the 1-based
/// column of the offending token.
SensorExpression parse_expression(std::string_view text);

/// Generic block description. Output expressions define where blocks are
/// created; operator outputs are per-operator sensor names.
struct BlockTemplate {
  std::vector<SensorExpression> inputs;
  std::vector<SensorExpression> outputs;
  std::vector<std::string> operator_outputs;

  std::string to_string() const;

  friend bool operator==(const BlockTemplate&, const BlockTemplate&) = default;
};

/// Parses the sectioned template syntax:
///
///   input:
///       <topdown+1>power
///       <bottomup, filter cpu>cpu-cycles
///   output:
///       <bottomup-1>healthy
///   operator_output:
///       avg-error
///
/// Lines starting with '#' are ignored. `first_line` is added to reported
/// line numbers so callers embedding a template in a larger file can report
/// file positions. Throws ParseError.
BlockTemplate parse_template(std::string_view text, std::size_t first_line = 1);

}  // namespace oda
