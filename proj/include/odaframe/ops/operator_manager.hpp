// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "odaframe/ops/operator.hpp"
#include "odaframe/ops/plugin_registry.hpp"
#include "odaframe/ops/worker_pool.hpp"

namespace oda {

/// How the manager reaches its host daemon.
struct ManagerHooks {
  /// Called once per new output topic set so the host can create caches and
  /// announce the sensors.
  std::function<void(std::span<const Topic>)> declare_outputs;
  /// Online outputs of one tick (or custom action) of one operator.
  std::function<void(const Operator&, std::vector<OutputReading>)> publish;
};

struct OperatorStatus {
  std::string plugin;
  std::string name;
  OperatorMode mode = OperatorMode::kOnline;
  Arrangement arrangement = Arrangement::kSequential;
  OperatorState state = OperatorState::kStopped;
  bool job_operator = false;
  std::size_t blocks = 0;
  std::uint64_t ticks = 0;
  std::uint64_t skipped = 0;
  std::uint64_t failures = 0;
};

struct LoadReport {
  std::string plugin;
  /// (instance name, block count)
  std::vector<std::pair<std::string, std::size_t>> operators;
  std::vector<SkippedBlock> skipped;
  bool replaced = false;
};

/// Loads plugins, owns their operators and drives them.
///
/// Online operators tick at multiples of their interval counted from the
/// manager epoch, so operators with equal intervals tick together. The
/// real-time scheduler dispatches due ticks onto a worker pool and skips (and
/// counts) a tick whose previous compute is still in flight. Simulations call
/// tick_due() with their own clock instead.
///
/// Operators of one plugin load are addressed by configured name; parallel
/// arrangements expand to instances "<name>@<k>", one per block, and the
/// configured name addresses the whole group.
class OperatorManager {
 public:
  OperatorManager(QueryEngine& engine, ManagerHooks hooks, std::size_t workers = 4,
                  PluginRegistry& registry = PluginRegistry::builtin());
  ~OperatorManager();

  OperatorManager(const OperatorManager&) = delete;
  OperatorManager& operator=(const OperatorManager&) = delete;

  /// Parses `config_text`, instantiates blocks and creates stopped operators.
  /// A plugin that is already loaded is stopped and replaced. Throws
  /// Error(kUnknownPlugin), ParseError, InstantiationError or
  /// Error(kConfigError) when nothing is instantiated.
  LoadReport load_plugin(const std::string& plugin, std::string_view config_text);
  void unload_plugin(const std::string& plugin);
  std::vector<std::string> loaded_plugins() const;

  /// Idempotent. Throws Error(kUnknownPlugin) / Error(kUnknownOperator).
  void start(const std::string& plugin, const std::string& op);
  /// Returns once in-flight computes of the operator have finished.
  void stop(const std::string& plugin, const std::string& op);
  void start_all();
  void stop_all();

  /// One computation of every instance in the group at `now`. Ticks at or
  /// before an instance's previous tick are skipped and counted.
  void tick(const std::string& plugin, const std::string& op, Timestamp now);
  /// Ticks every running online operator whose schedule has a slot at `now`,
  /// in load order; parallel instances of one operator run on the pool.
  void tick_due(Timestamp now);

  void set_epoch(Timestamp epoch);
  Timestamp epoch() const;

  /// Runs the operator once for one block and returns its outputs without
  /// publishing them. Throws Error(kWrongMode), Error(kNotRunning),
  /// Error(kUnknownBlock).
  std::vector<OutputReading> on_demand(const std::string& plugin, const std::string& op,
                                       const std::string& block, Timestamp now);

  std::string custom_action(const std::string& plugin, const std::string& op,
                            const std::string& action,
                            const std::map<std::string, std::string>& params, Timestamp now);

  /// One block per job, named by job id; jobs without resolvable inputs are
  /// skipped with a warning.
  std::vector<Block> build_job_blocks(const Operator& op, const std::vector<JobInfo>& jobs) const;

  void start_scheduler();
  void stop_scheduler();

  std::vector<OperatorStatus> list() const;
  std::shared_ptr<Operator> find(const std::string& plugin, const std::string& op) const;
  /// Instances matching an instance name or a configured (group) name.
  std::vector<std::shared_ptr<Operator>> find_group(const std::string& plugin,
                                                    const std::string& op) const;

  QueryEngine& engine() noexcept { return engine_; }

 private:
  void run_tick(Operator& op, Timestamp now, bool blocking);
  void scheduler_loop();

  QueryEngine& engine_;
  ManagerHooks hooks_;
  PluginRegistry& registry_;
  WorkerPool pool_;

  mutable std::mutex mutex_;
  std::condition_variable scheduler_cv_;
  std::vector<std::pair<std::string, std::vector<std::shared_ptr<Operator>>>> plugins_;
  std::unordered_map<const Operator*, Timestamp> last_tick_;
  std::unordered_map<const Operator*, Timestamp> next_due_;
  std::unordered_map<const Operator*, std::shared_ptr<std::atomic<bool>>> in_flight_;
  Timestamp epoch_ = 0;

  bool scheduler_running_ = false;
  std::thread scheduler_;
};

}  // namespace oda
