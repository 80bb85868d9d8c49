// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/daemons.hpp"

#include <csignal>
#include <fstream>
#include <map>

#include <spdlog/spdlog.h>

#include "odaframe/common/clock.hpp"
#include "odaframe/daemon/sources.hpp"

namespace oda {

namespace {

// Thrown for plugin sections that may load once more sensors are known.
bool retryable(const Error& e) {
  return e.code() == ErrorCode::kEmptyTree || e.code() == ErrorCode::kInstantiationError ||
         e.code() == ErrorCode::kConfigError;
}

[[noreturn]] void plugin_failure(const PluginSection& p, const Error& e) {
  std::size_t line = p.first_line;
  if (const auto* pe = dynamic_cast<const ParseError*>(&e); pe && pe->line() > 0)
    line = p.first_line + pe->line() - 1;
  throw Error(ErrorCode::kConfigError,
              "line " + std::to_string(line) + ": plugin " + p.plugin + ": " + e.what());
}

}  // namespace

AgentOptions agent_options(const DaemonConfig& config) {
  AgentOptions o;
  o.cache_capacity = config.cache_capacity;
  o.default_interval = config.sampling_interval;
  o.workers = config.workers;
  if (config.hierarchy) o.hierarchy = HierarchySpec{*config.hierarchy};
  return o;
}

// --- pusher ----------------------------------------------------------------

PusherDaemon::PusherDaemon(DaemonConfig config, PluginRegistry& registry)
    : config_(std::move(config)), agent_(agent_options(config_), registry) {
  for (const auto& s : config_.sources) sources_.push_back(make_source(s, config_.sampling_interval));
}

PusherDaemon::~PusherDaemon() { stop(); }

void PusherDaemon::add_source(std::unique_ptr<SensorSource> source) {
  std::lock_guard lock(mutex_);
  if (running_) throw Error(ErrorCode::kInvalidArgument, "sources must be added before start");
  sources_.push_back(std::move(source));
}

void PusherDaemon::start() {
  {
    std::lock_guard lock(mutex_);
    if (running_) return;
  }
  for (const auto& s : sources_) agent_.ensure_sensors(s->topics(), s->interval());
  agent_.refresh_tree();

  for (const auto& p : config_.plugins) {
    try {
      const auto report = agent_.operators().load_plugin(p.plugin, p.text);
      for (const auto& [name, blocks] : report.operators)
        spdlog::info("pusher: {}/{} loaded with {} blocks", p.plugin, name, blocks);
    } catch (const Error& e) {
      plugin_failure(p, e);
    }
  }

  publisher_ = std::make_unique<Publisher>(config_.connect_host, config_.connect_port);
  agent_.set_output_sink([pub = publisher_.get()](const Topic& t, std::span<const SensorReading> r) {
    pub->publish(t, r);
  });
  agent_.operators().start_all();
  agent_.operators().start_scheduler();

  {
    std::lock_guard lock(mutex_);
    running_ = true;
  }
  sampler_ = std::thread([this] { sampling_loop(); });

  if (config_.rest_port != 0) {
    api_ = std::make_unique<RestApi>(agent_);
    rest_ = std::make_unique<RestServer>(*api_, config_.rest_host, config_.rest_port);
    rest_->start();
  }
  spdlog::info("pusher: {} sources, {} sensors, publishing to {}:{}", sources_.size(),
               agent_.sensor_count(), config_.connect_host, config_.connect_port);
}

void PusherDaemon::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!running_) return;
    running_ = false;
  }
  cv_.notify_all();
  if (sampler_.joinable()) sampler_.join();
  if (rest_) rest_->stop();
  agent_.operators().stop_scheduler();
  agent_.operators().stop_all();
  if (publisher_) {
    if (!publisher_->flush(std::chrono::seconds(2)))
      spdlog::warn("pusher: shutting down with unsent frames");
    publisher_->close();
  }
}

void PusherDaemon::sampling_loop() {
  std::vector<Timestamp> due(sources_.size());
  const Timestamp start = wall_now();
  for (std::size_t i = 0; i < sources_.size(); ++i) due[i] = next_aligned(0, sources_[i]->interval(), start);

  std::vector<std::pair<std::size_t, SensorReading>> batch;
  std::unique_lock lock(mutex_);
  while (running_) {
    if (sources_.empty()) {
      cv_.wait(lock, [this] { return !running_; });
      break;
    }
    const Timestamp next = *std::min_element(due.begin(), due.end());
    if (cv_.wait_until(lock, to_time_point(next), [this] { return !running_; })) break;
    lock.unlock();
    const Timestamp now = wall_now();
    for (std::size_t i = 0; i < sources_.size(); ++i) {
      if (due[i] > now) continue;
      auto& src = *sources_[i];
      batch.clear();
      src.sample(due[i], [&batch](std::size_t idx, SensorReading r) { batch.emplace_back(idx, r); });
      const auto& topics = src.topics();
      for (const auto& [idx, r] : batch) {
        agent_.ingest(topics[idx], std::span<const SensorReading>(&r, 1));
        publisher_->publish(topics[idx], std::span<const SensorReading>(&r, 1));
      }
      sampled_.fetch_add(batch.size());
      // A late loop skips missed slots rather than sampling them in a burst.
      due[i] = next_aligned(0, src.interval(), now);
    }
    lock.lock();
  }
}

// --- collector -------------------------------------------------------------

CollectorDaemon::CollectorDaemon(DaemonConfig config, PluginRegistry& registry)
    : config_(std::move(config)), agent_(agent_options(config_), registry) {}

CollectorDaemon::~CollectorDaemon() { stop(); }

void CollectorDaemon::start() {
  {
    std::lock_guard lock(mutex_);
    if (running_) return;
  }
  store_ = std::make_shared<TimeSeriesStore>(config_.store_dir);
  agent_.attach_store(store_);
  agent_.set_output_sink([store = store_](const Topic& t, std::span<const SensorReading> r) {
    store->append(t, r);
  });

  if (!config_.jobs_file.empty()) {
    std::ifstream in(config_.jobs_file);
    if (!in) throw Error(ErrorCode::kConfigError, config_.jobs_file + ": cannot open jobs file");
    try {
      const auto n = agent_.jobs().load_json_lines(in);
      spdlog::info("collector: {} jobs loaded", n);
    } catch (const ParseError& e) {
      throw Error(ErrorCode::kConfigError,
                  config_.jobs_file + ":" + std::to_string(e.line()) + ": " + e.reason());
    }
  }

  // Sensors already in the store are known before any pusher connects.
  {
    const auto stored = store_->topics();
    if (!stored.empty()) agent_.ensure_sensors(stored);
    agent_.refresh_tree();
  }
  {
    std::lock_guard lock(mutex_);
    pending_ = config_.plugins;
  }
  try_pending_plugins(true);

  server_ = std::make_unique<CollectorServer>(config_.listen_host, config_.listen_port,
                                              [this](const Frame& f) { on_frame(f); });
  server_->start();
  agent_.operators().start_scheduler();
  {
    std::lock_guard lock(mutex_);
    running_ = true;
  }
  maintenance_ = std::thread([this] { maintenance_loop(); });

  if (config_.rest_port != 0) {
    api_ = std::make_unique<RestApi>(agent_);
    rest_ = std::make_unique<RestServer>(*api_, config_.rest_host, config_.rest_port);
    rest_->start();
  }
  spdlog::info("collector: listening on {}:{}, store {}", config_.listen_host, server_->port(),
               config_.store_dir);
}

void CollectorDaemon::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!running_) return;
    running_ = false;
  }
  cv_.notify_all();
  if (maintenance_.joinable()) maintenance_.join();
  if (rest_) rest_->stop();
  if (server_) server_->stop();
  agent_.operators().stop_scheduler();
  agent_.operators().stop_all();
  if (store_) store_->sync();
}

std::vector<std::string> CollectorDaemon::pending_plugins() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& p : pending_) out.push_back(p.plugin);
  return out;
}

void CollectorDaemon::on_frame(const Frame& frame) {
  agent_.ingest(frame.topic, frame.readings);
  store_->append(frame.topic, frame.readings);
  received_.fetch_add(frame.readings.size());
}

void CollectorDaemon::try_pending_plugins(bool fail_hard) {
  std::vector<PluginSection> pending;
  {
    std::lock_guard lock(mutex_);
    pending.swap(pending_);
  }
  std::vector<PluginSection> still;
  for (auto& p : pending) {
    try {
      const auto report = agent_.operators().load_plugin(p.plugin, p.text);
      for (const auto& [name, blocks] : report.operators) {
        agent_.operators().start(p.plugin, name);
        spdlog::info("collector: {}/{} loaded with {} blocks", p.plugin, name, blocks);
      }
    } catch (const Error& e) {
      if (retryable(e) && !dynamic_cast<const ParseError*>(&e)) {
        spdlog::debug("collector: plugin {} waits for sensors: {}", p.plugin, e.what());
        still.push_back(std::move(p));
        continue;
      }
      if (fail_hard) plugin_failure(p, e);
      spdlog::error("collector: dropping plugin {}: {}", p.plugin, e.what());
    }
  }
  std::lock_guard lock(mutex_);
  for (auto& p : still) pending_.push_back(std::move(p));
}

void CollectorDaemon::maintenance_loop() {
  std::size_t known = agent_.sensor_count();
  std::unique_lock lock(mutex_);
  while (running_) {
    if (cv_.wait_for(lock, std::chrono::milliseconds(500), [this] { return !running_; })) break;
    const bool waiting = !pending_.empty();
    lock.unlock();
    agent_.refresh_tree();
    const std::size_t now_known = agent_.sensor_count();
    if (waiting && now_known != known) try_pending_plugins(false);
    known = now_known;
    lock.lock();
  }
}

// --- process entry ---------------------------------------------------------

int run_daemon(const DaemonConfig& config) {
  // Block the signals before any thread starts so only sigwait sees them.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  std::signal(SIGPIPE, SIG_IGN);

  auto wait_for_signal = [&set] {
    int sig = 0;
    sigwait(&set, &sig);
    spdlog::info("received signal {}, shutting down", sig);
  };

  try {
    if (config.role == DaemonRole::kPusher) {
      PusherDaemon d(config);
      d.start();
      wait_for_signal();
      d.stop();
    } else {
      CollectorDaemon d(config);
      d.start();
      wait_for_signal();
      d.stop();
    }
  } catch (const std::exception& e) {
    spdlog::critical("{}", e.what());
    return 1;
  }
  return 0;
}

}  // namespace oda
