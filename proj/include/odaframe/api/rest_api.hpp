// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <string>

#include <json.hpp>

#include "odaframe/daemon/agent.hpp"

namespace oda {

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// HTTP status for an error code.
int http_status(ErrorCode code);
/// {"status": "error", "code": ..., "message": ...}, plus "line"/"column" for
/// parse errors and "skipped" for instantiation errors.
ApiResponse error_response(const std::exception& e);

nlohmann::json readings_json(const std::vector<SensorReading>& readings);

/// Route handlers over one Agent. Each returns the response instead of
/// throwing, so the HTTP server stays a thin shell and tests can call the
/// handlers directly.
///
///   GET  /sensors?prefix=P
///   GET  /data?sensor=T&rel=MS  |  ?sensor=T&t0=NS&t1=NS
///   GET  /operators
///   PUT  /operators/{plugin}/{op}/{start|stop|ACTION}?k=v...
///   GET  /compute/{plugin}/{op}/{block}
///   POST /plugins/{name}/load        body: plugin configuration
///   GET  /jobs
///   POST /jobs                       body: JSON lines
class RestApi {
 public:
  using Clock = std::function<Timestamp()>;

  explicit RestApi(Agent& agent, Clock clock = {});

  ApiResponse sensors(const std::string& prefix) const;
  ApiResponse data(const std::map<std::string, std::string>& params) const;
  ApiResponse operators() const;
  ApiResponse operator_action(const std::string& plugin, const std::string& op,
                              const std::string& action,
                              const std::map<std::string, std::string>& params);
  ApiResponse compute(const std::string& plugin, const std::string& op, const std::string& block);
  ApiResponse load_plugin(const std::string& plugin, const std::string& config_text);
  ApiResponse jobs() const;
  ApiResponse add_jobs(const std::string& body);

 private:
  Agent& agent_;
  Clock clock_;
};

/// HTTP/1.1 front end for a RestApi.
class RestServer {
 public:
  RestServer(RestApi& api, std::string host, std::uint16_t port);
  ~RestServer();

  RestServer(const RestServer&) = delete;
  RestServer& operator=(const RestServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Throws Error(kIoError) when binding fails.
  void start();
  void stop();
  std::uint16_t port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  std::uint16_t port_;
};

}  // namespace oda
