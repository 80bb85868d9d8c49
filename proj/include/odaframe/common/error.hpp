// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oda {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidTopic,
  kInvalidRange,
  kEmptyTree,
  kParseError,
  kInstantiationError,
  kUnknownSensor,
  kFeatureUnavailable,
  kUnknownPlugin,
  kUnknownOperator,
  kUnknownBlock,
  kUnknownAction,
  kWrongMode,
  kNotRunning,
  kNotReady,
  kConfigError,
  kEncodeError,
  kDecodeError,
  kIoError,
};

/// Stable machine-readable name of an error code, used in REST bodies.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based line and column. Line 0 means "single-line
/// input", in which case only the column is meaningful.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

/// Binary decode failure at a byte offset.
class DecodeError : public Error {
 public:
  DecodeError(std::size_t offset, const std::string& message);

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace oda
