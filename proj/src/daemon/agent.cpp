// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/agent.hpp"

#include <map>

#include <spdlog/spdlog.h>

namespace oda {

Agent::Agent(AgentOptions options, PluginRegistry& registry) : options_(std::move(options)) {
  DataSourceBinding binding;
  binding.cache_lookup = [this](const Topic& t) -> std::shared_ptr<const SensorCache> { return cache(t); };
  binding.store_query = [this](const Topic& t, Timestamp t0,
                               Timestamp t1) -> std::optional<std::vector<SensorReading>> {
    auto s = store();
    if (!s) return std::nullopt;
    return s->query(t, t0, t1);
  };
  binding.store_newest = [this](const Topic& t) -> std::optional<Timestamp> {
    auto s = store();
    if (!s) return std::nullopt;
    return s->newest(t);
  };
  binding.job_lookup = [this] { return jobs_.all(); };
  engine_.bind(std::move(binding));

  ManagerHooks hooks;
  hooks.declare_outputs = [this](std::span<const Topic> topics) {
    ensure_sensors(topics);
    refresh_tree();
  };
  hooks.publish = [this](const Operator& op, std::vector<OutputReading> outputs) {
    publish_outputs(op, std::move(outputs));
  };
  manager_ = std::make_unique<OperatorManager>(engine_, std::move(hooks), options_.workers, registry);
}

Agent::~Agent() {
  // Operators must stop before the caches they write into go away.
  manager_.reset();
}

void Agent::ensure_sensors(std::span<const Topic> topics, Duration interval) {
  if (interval == 0) interval = options_.default_interval;
  std::unique_lock lock(sensors_mutex_);
  for (const auto& t : topics) {
    if (caches_.count(t)) continue;
    caches_.emplace(t, std::make_shared<SensorCache>(options_.cache_capacity, interval));
    tree_dirty_.store(true);
  }
}

void Agent::ingest(const Topic& topic, std::span<const SensorReading> readings) {
  auto c = cache(topic);
  if (!c) {
    ensure_sensors(std::span<const Topic>(&topic, 1));
    c = cache(topic);
  }
  for (const auto& r : readings) c->store(r);
}

std::shared_ptr<SensorCache> Agent::cache(const Topic& topic) const {
  std::shared_lock lock(sensors_mutex_);
  auto it = caches_.find(topic);
  return it == caches_.end() ? nullptr : it->second;
}

std::vector<Topic> Agent::sensors() const {
  std::shared_lock lock(sensors_mutex_);
  std::vector<Topic> out;
  out.reserve(caches_.size());
  for (const auto& [t, _] : caches_) out.push_back(t);
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t Agent::sensor_count() const {
  std::shared_lock lock(sensors_mutex_);
  return caches_.size();
}

void Agent::refresh_tree() {
  std::lock_guard lock(tree_mutex_);
  if (!tree_dirty_.exchange(false)) return;
  const auto topics = sensors();
  if (topics.empty()) return;
  auto result = build_tree(std::span<const Topic>(topics), options_.hierarchy);
  for (const auto& r : result.rejected) spdlog::warn("sensor tree: rejected {}: {}", r.topic, r.reason);
  engine_.set_tree(std::make_shared<const SensorTree>(std::move(result.tree)));
}

void Agent::attach_store(std::shared_ptr<TimeSeriesStore> store) {
  std::lock_guard lock(sink_mutex_);
  store_ = std::move(store);
}

std::shared_ptr<TimeSeriesStore> Agent::store() const {
  std::lock_guard lock(sink_mutex_);
  return store_;
}

void Agent::set_output_sink(ReadingSink sink) {
  std::lock_guard lock(sink_mutex_);
  sink_ = std::move(sink);
}

void Agent::tick(Timestamp now) {
  refresh_tree();
  manager_->tick_due(now);
}

void Agent::publish_outputs(const Operator& op, std::vector<OutputReading> outputs) {
  // Group per topic, keeping emission order.
  std::map<Topic, std::vector<SensorReading>> grouped;
  for (auto& o : outputs) grouped[o.topic].push_back(o.reading);
  for (const auto& [topic, readings] : grouped) ingest(topic, readings);
  outputs_.fetch_add(outputs.size());
  if (!op.config().streaming) return;
  ReadingSink sink;
  {
    std::lock_guard lock(sink_mutex_);
    sink = sink_;
  }
  if (!sink) return;
  for (const auto& [topic, readings] : grouped) sink(topic, readings);
}

}  // namespace oda
