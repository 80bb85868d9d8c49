// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#include "odaframe/api/rest_api.hpp"
#include "odaframe/daemon/agent.hpp"
#include "odaframe/daemon/daemon_config.hpp"
#include "odaframe/sensor/source.hpp"
#include "odaframe/transport/pubsub.hpp"
#include "odaframe/transport/store.hpp"

namespace oda {

AgentOptions agent_options(const DaemonConfig& config);

/// Node-local daemon: samples its sources into the caches, runs in-band
/// operators and publishes readings and streaming outputs to a collector.
class PusherDaemon {
 public:
  /// Builds the configured sources. Throws Error(kConfigError).
  explicit PusherDaemon(DaemonConfig config, PluginRegistry& registry = PluginRegistry::builtin());
  ~PusherDaemon();

  PusherDaemon(const PusherDaemon&) = delete;
  PusherDaemon& operator=(const PusherDaemon&) = delete;

  /// Only before start().
  void add_source(std::unique_ptr<SensorSource> source);

  /// Creates caches, loads and starts the configured plugins, then starts
  /// publishing, sampling, the operator scheduler and REST. Throws
  /// Error(kConfigError) for plugin sections that fail to load.
  void start();
  /// Stops sampling and operators and flushes the publisher queue.
  void stop();

  Agent& agent() noexcept { return agent_; }
  Publisher* publisher() noexcept { return publisher_.get(); }
  std::uint16_t rest_port() const noexcept { return rest_ ? rest_->port() : 0; }
  std::uint64_t readings_sampled() const noexcept { return sampled_.load(); }

 private:
  void sampling_loop();

  DaemonConfig config_;
  Agent agent_;
  std::vector<std::unique_ptr<SensorSource>> sources_;
  std::unique_ptr<Publisher> publisher_;
  std::unique_ptr<RestApi> api_;
  std::unique_ptr<RestServer> rest_;

  std::mutex mutex_;
  std::condition_variable cv_;
  bool running_ = false;
  std::thread sampler_;
  std::atomic<std::uint64_t> sampled_{0};
};

/// Central daemon: receives frames from pushers into its caches and the
/// store, fans them out to subscribers and runs out-of-band operators.
///
/// Plugins whose blocks cannot be built yet (no matching sensors have
/// arrived) are retried whenever the sensor tree grows.
class CollectorDaemon {
 public:
  explicit CollectorDaemon(DaemonConfig config, PluginRegistry& registry = PluginRegistry::builtin());
  ~CollectorDaemon();

  CollectorDaemon(const CollectorDaemon&) = delete;
  CollectorDaemon& operator=(const CollectorDaemon&) = delete;

  /// Opens the store, loads jobs and plugins, binds the listener and REST.
  /// Throws Error(kConfigError) or Error(kIoError).
  void start();
  /// Stops accepting, stops operators and syncs the store.
  void stop();

  Agent& agent() noexcept { return agent_; }
  TimeSeriesStore& store() { return *store_; }
  std::uint16_t port() const noexcept { return server_ ? server_->port() : 0; }
  std::uint16_t rest_port() const noexcept { return rest_ ? rest_->port() : 0; }
  std::uint64_t readings_received() const noexcept { return received_.load(); }
  /// Plugin sections still waiting for their sensors.
  std::vector<std::string> pending_plugins() const;

 private:
  void on_frame(const Frame& frame);
  void maintenance_loop();
  /// Loads pending plugins. With `fail_hard`, malformed sections throw
  /// instead of being dropped with an error log.
  void try_pending_plugins(bool fail_hard);

  DaemonConfig config_;
  Agent agent_;
  std::shared_ptr<TimeSeriesStore> store_;
  std::unique_ptr<CollectorServer> server_;
  std::unique_ptr<RestApi> api_;
  std::unique_ptr<RestServer> rest_;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  bool running_ = false;
  std::vector<PluginSection> pending_;
  std::thread maintenance_;
  std::atomic<std::uint64_t> received_{0};
};

/// Runs the configured daemon until SIGINT or SIGTERM. Returns the process
/// exit status.
int run_daemon(const DaemonConfig& config);

}  // namespace oda
