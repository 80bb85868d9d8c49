// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/transport/pubsub.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <spdlog/spdlog.h>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

constexpr std::size_t kMaxBatchBytes = 256 * 1024;

bool send_all(int fd, const std::uint8_t* data, std::size_t size) {
  while (size > 0) {
    ssize_t n = ::send(fd, data, size, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
  return true;
}

int connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) return -1;
  int fd = -1;
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd >= 0) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  return fd;
}

}  // namespace

// --- collector ---------------------------------------------------------------

struct CollectorServer::Connection {
  int fd = -1;
  std::thread thread;
  std::atomic<bool> done{false};
  // Set once the handshake marks this connection as a subscriber.
  std::atomic<bool> subscriber{false};
  std::string prefix;
  std::mutex send_mutex;
};

CollectorServer::CollectorServer(std::string bind_address, std::uint16_t port, FrameHandler handler)
    : bind_address_(std::move(bind_address)), port_(port), handler_(std::move(handler)) {}

CollectorServer::~CollectorServer() { stop(); }

void CollectorServer::start() {
  if (running_.load()) return;
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw Error(ErrorCode::kIoError, std::string("socket: ") + std::strerror(errno));
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port_);
  if (::inet_pton(AF_INET, bind_address_.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(ErrorCode::kIoError, "bad bind address '" + bind_address_ + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listen_fd_, 64) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listen_fd_);
    listen_fd_ = -1;
    throw Error(ErrorCode::kIoError, "cannot listen on " + bind_address_ + ":" +
                                         std::to_string(port_) + ": " + reason);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_.store(true);
  acceptor_ = std::thread([this] { accept_loop(); });
}

void CollectorServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  listen_fd_ = -1;
  if (acceptor_.joinable()) acceptor_.join();
  std::list<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(mutex_);
    conns.swap(connections_);
  }
  for (auto& c : conns) ::shutdown(c->fd, SHUT_RDWR);
  for (auto& c : conns) {
    if (c->thread.joinable()) c->thread.join();
    ::close(c->fd);
  }
}

std::size_t CollectorServer::subscribers() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(std::count_if(connections_.begin(), connections_.end(), [](const auto& c) {
    return c->subscriber.load() && !c->done.load();
  }));
}

void CollectorServer::accept_loop() {
  while (running_.load()) {
    int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) {
      if (errno == EINTR) continue;
      if (!running_.load()) break;
      spdlog::warn("collector accept failed: {}", std::strerror(errno));
      continue;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(mutex_);
    // Reap finished connections.
    for (auto it = connections_.begin(); it != connections_.end();) {
      if ((*it)->done.load()) {
        if ((*it)->thread.joinable()) (*it)->thread.join();
        ::close((*it)->fd);
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
    connections_.push_back(conn);
    conn->thread = std::thread([this, conn] { serve(conn); });
  }
}

void CollectorServer::serve(std::shared_ptr<Connection> conn) {
  std::vector<std::uint8_t> pending;
  std::uint8_t buf[64 * 1024];
  std::optional<Handshake> hs;
  FrameReader reader;
  try {
    for (;;) {
      ssize_t n = ::recv(conn->fd, buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      std::span<const std::uint8_t> chunk(buf, static_cast<std::size_t>(n));
      if (!hs) {
        pending.insert(pending.end(), chunk.begin(), chunk.end());
        auto parsed = decode_handshake(pending);
        if (!parsed) continue;
        hs = parsed->first;
        chunk = std::span<const std::uint8_t>(pending).subspan(parsed->second);
        if (hs->role == PeerRole::kSubscriber) {
          conn->prefix = hs->prefix.empty() ? "/" : hs->prefix;
          conn->subscriber.store(true);
        }
      }
      if (hs->role == PeerRole::kSubscriber) continue;  // ignore anything a subscriber sends
      reader.feed(chunk);
      pending.clear();
      while (auto raw = reader.next_raw()) {
        Frame frame = decode_frame(*raw);
        frames_.fetch_add(1);
        if (handler_) handler_(frame);
        fan_out(frame.topic, *raw);
      }
    }
  } catch (const DecodeError& e) {
    decode_errors_.fetch_add(1);
    spdlog::warn("collector: dropping connection: {}", e.what());
  } catch (const std::exception& e) {
    spdlog::warn("collector: connection failed: {}", e.what());
  }
  conn->subscriber.store(false);
  conn->done.store(true);
}

void CollectorServer::fan_out(const Topic& topic, const std::vector<std::uint8_t>& raw) {
  std::vector<std::shared_ptr<Connection>> targets;
  {
    std::lock_guard lock(mutex_);
    for (const auto& c : connections_) {
      if (c->subscriber.load() && !c->done.load() && topic_has_prefix(topic.str(), c->prefix))
        targets.push_back(c);
    }
  }
  for (auto& c : targets) {
    std::lock_guard lock(c->send_mutex);
    if (!send_all(c->fd, raw.data(), raw.size())) {
      c->subscriber.store(false);
      ::shutdown(c->fd, SHUT_RDWR);
    }
  }
}

// --- publisher ---------------------------------------------------------------

Publisher::Publisher(std::string host, std::uint16_t port, PublisherOptions options)
    : host_(std::move(host)), port_(port), options_(options) {
  worker_ = std::thread([this] { run(); });
}

Publisher::~Publisher() { close(); }

void Publisher::publish(const Topic& topic, std::span<const SensorReading> readings) {
  publish_raw(encode_frame(topic, readings));
}

void Publisher::publish_raw(std::vector<std::uint8_t> frame) {
  {
    std::lock_guard lock(mutex_);
    if (closing_) return;
    if (queue_.size() >= std::max<std::size_t>(options_.queue_limit, 1)) {
      queue_.pop_front();
      dropped_.fetch_add(1);
    }
    queue_.push_back(std::move(frame));
  }
  cv_.notify_all();
}

bool Publisher::flush(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return cv_.wait_for(lock, timeout, [this] { return queue_.empty() && !sending_; });
}

void Publisher::close() {
  {
    std::lock_guard lock(mutex_);
    if (closing_ && !worker_.joinable()) return;
    closing_ = true;
  }
  cv_.notify_all();
  if (worker_.joinable()) worker_.join();
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  connected_.store(false);
}

bool Publisher::connect_once() {
  fd_ = connect_tcp(host_, port_);
  if (fd_ < 0) return false;
  const auto hs = encode_handshake({PeerRole::kPublisher, ""});
  if (!send_all(fd_, hs.data(), hs.size())) {
    ::close(fd_);
    fd_ = -1;
    return false;
  }
  connected_.store(true);
  return true;
}

void Publisher::run() {
  auto backoff = options_.initial_backoff;
  bool ever_connected = false;
  for (;;) {
    if (fd_ < 0) {
      {
        std::unique_lock lock(mutex_);
        if (closing_) return;
      }
      if (connect_once()) {
        if (ever_connected) reconnects_.fetch_add(1);
        ever_connected = true;
        backoff = options_.initial_backoff;
      } else {
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, backoff, [this] { return closing_; });
        if (closing_) return;
        backoff = std::min(backoff * 2, options_.max_backoff);
        continue;
      }
    }

    // Coalesce queued frames into one write; a failed write drops them all.
    std::vector<std::uint8_t> batch;
    std::size_t frames = 0;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return closing_ || !queue_.empty(); });
      if (queue_.empty()) return;  // closing with nothing left to send
      while (!queue_.empty() && (frames == 0 || batch.size() + queue_.front().size() <= kMaxBatchBytes)) {
        if (frames == 0) {
          batch = std::move(queue_.front());
        } else {
          batch.insert(batch.end(), queue_.front().begin(), queue_.front().end());
        }
        queue_.pop_front();
        ++frames;
      }
      sending_ = true;
    }
    const bool ok = send_all(fd_, batch.data(), batch.size());
    if (ok) {
      sent_.fetch_add(frames);
    } else {
      dropped_.fetch_add(frames);
      spdlog::warn("publisher: connection to {}:{} lost", host_, port_);
      ::close(fd_);
      fd_ = -1;
      connected_.store(false);
    }
    {
      std::lock_guard lock(mutex_);
      sending_ = false;
    }
    cv_.notify_all();
  }
}

// --- subscriber --------------------------------------------------------------

Subscriber::Subscriber(const std::string& host, std::uint16_t port, std::string prefix,
                       FrameHandler handler)
    : handler_(std::move(handler)) {
  fd_ = connect_tcp(host, port);
  if (fd_ < 0) throw Error(ErrorCode::kIoError, "cannot connect to " + host + ":" + std::to_string(port));
  const auto hs = encode_handshake({PeerRole::kSubscriber, std::move(prefix)});
  if (!send_all(fd_, hs.data(), hs.size())) {
    ::close(fd_);
    throw Error(ErrorCode::kIoError, "handshake failed");
  }
  worker_ = std::thread([this] { run(); });
}

Subscriber::~Subscriber() { close(); }

void Subscriber::close() {
  running_.store(false);
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  if (worker_.joinable()) worker_.join();
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Subscriber::run() {
  FrameReader reader;
  std::uint8_t buf[64 * 1024];
  try {
    while (running_.load()) {
      ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) break;
      reader.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
      while (auto frame = reader.next()) {
        frames_.fetch_add(1);
        if (handler_) handler_(*frame);
      }
    }
  } catch (const std::exception& e) {
    spdlog::warn("subscriber: {}", e.what());
  }
}

}  // namespace oda
