// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/common/error.hpp"

namespace oda {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kInvalidTopic: return "invalid_topic";
    case ErrorCode::kInvalidRange: return "invalid_range";
    case ErrorCode::kEmptyTree: return "empty_tree";
    case ErrorCode::kParseError: return "parse_error";
    case ErrorCode::kInstantiationError: return "instantiation_error";
    case ErrorCode::kUnknownSensor: return "unknown_sensor";
    case ErrorCode::kFeatureUnavailable: return "feature_unavailable";
    case ErrorCode::kUnknownPlugin: return "unknown_plugin";
    case ErrorCode::kUnknownOperator: return "unknown_operator";
    case ErrorCode::kUnknownBlock: return "unknown_block";
    case ErrorCode::kUnknownAction: return "unknown_action";
    case ErrorCode::kWrongMode: return "wrong_mode";
    case ErrorCode::kNotRunning: return "not_running";
    case ErrorCode::kNotReady: return "not_ready";
    case ErrorCode::kConfigError: return "config_error";
    case ErrorCode::kEncodeError: return "encode_error";
    case ErrorCode::kDecodeError: return "decode_error";
    case ErrorCode::kIoError: return "io_error";
  }
  return "unknown";
}

namespace {

std::string format_location(std::size_t line, std::size_t column,
                            const std::string& message) {
  std::string out;
  if (line > 0) {
    out = "line " + std::to_string(line) + ", ";
  }
  out += "column " + std::to_string(column) + ": " + message;
  return out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column,
                       const std::string& message)
    : Error(ErrorCode::kParseError, format_location(line, column, message)),
      line_(line),
      column_(column),
      reason_(message) {}

DecodeError::DecodeError(std::size_t offset, const std::string& message)
    : Error(ErrorCode::kDecodeError,
            "offset " + std::to_string(offset) + ": " + message),
      offset_(offset) {}

}  // namespace oda
