// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "odaframe/transport/frame.hpp"

namespace oda {

using FrameHandler = std::function<void(const Frame& frame)>;

/// Collector side of the protocol. Publisher connections deliver frames to
/// the handler (on that connection's thread, so per-topic order holds for
/// one publisher) and fan the raw frame out to every subscriber whose prefix
/// matches the topic.
class CollectorServer {
 public:
  CollectorServer(std::string bind_address, std::uint16_t port, FrameHandler handler);
  ~CollectorServer();

  CollectorServer(const CollectorServer&) = delete;
  CollectorServer& operator=(const CollectorServer&) = delete;

  /// Binds and starts accepting. Port 0 picks a free port. Throws
  /// Error(kIoError).
  void start();
  void stop();

  std::uint16_t port() const noexcept { return port_; }
  std::uint64_t frames_received() const noexcept { return frames_.load(); }
  std::uint64_t decode_errors() const noexcept { return decode_errors_.load(); }
  std::size_t subscribers() const;

 private:
  struct Connection;

  void accept_loop();
  void serve(std::shared_ptr<Connection> conn);
  void fan_out(const Topic& topic, const std::vector<std::uint8_t>& raw);

  std::string bind_address_;
  std::uint16_t port_;
  FrameHandler handler_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;

  mutable std::mutex mutex_;
  std::list<std::shared_ptr<Connection>> connections_;
  std::atomic<std::uint64_t> frames_{0};
  std::atomic<std::uint64_t> decode_errors_{0};
};

struct PublisherOptions {
  std::size_t queue_limit = 10'000;
  std::chrono::milliseconds initial_backoff{50};
  std::chrono::milliseconds max_backoff{2000};
};

/// Pusher side: frames are queued and sent by a background thread, which
/// coalesces whatever is queued into one write. While disconnected the queue
/// keeps the newest `queue_limit` frames; frames in a failed write are
/// dropped rather than resent (at-most-once).
class Publisher {
 public:
  Publisher(std::string host, std::uint16_t port, PublisherOptions options = {});
  ~Publisher();

  Publisher(const Publisher&) = delete;
  Publisher& operator=(const Publisher&) = delete;

  void publish(const Topic& topic, std::span<const SensorReading> readings);
  void publish_raw(std::vector<std::uint8_t> frame);

  /// Waits until the queue is drained or `timeout` passes.
  bool flush(std::chrono::milliseconds timeout);
  void close();

  bool connected() const noexcept { return connected_.load(); }
  std::uint64_t sent() const noexcept { return sent_.load(); }
  std::uint64_t dropped() const noexcept { return dropped_.load(); }
  std::uint64_t reconnects() const noexcept { return reconnects_.load(); }

 private:
  void run();
  bool connect_once();

  std::string host_;
  std::uint16_t port_;
  PublisherOptions options_;
  int fd_ = -1;

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::vector<std::uint8_t>> queue_;
  bool sending_ = false;
  bool closing_ = false;
  std::thread worker_;

  std::atomic<bool> connected_{false};
  std::atomic<std::uint64_t> sent_{0};
  std::atomic<std::uint64_t> dropped_{0};
  std::atomic<std::uint64_t> reconnects_{0};
};

/// Subscriber client: receives every frame under `prefix` on its own thread.
class Subscriber {
 public:
  /// Connects and sends the handshake. Throws Error(kIoError).
  Subscriber(const std::string& host, std::uint16_t port, std::string prefix, FrameHandler handler);
  ~Subscriber();

  Subscriber(const Subscriber&) = delete;
  Subscriber& operator=(const Subscriber&) = delete;

  void close();
  std::uint64_t frames_received() const noexcept { return frames_.load(); }

 private:
  void run();

  int fd_ = -1;
  FrameHandler handler_;
  std::atomic<bool> running_{true};
  std::atomic<std::uint64_t> frames_{0};
  std::thread worker_;
};

}  // namespace oda
