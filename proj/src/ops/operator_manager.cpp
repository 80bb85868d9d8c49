// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/ops/operator_manager.hpp"

#include <algorithm>
#include <future>

#include <spdlog/spdlog.h>

#include "odaframe/common/clock.hpp"

namespace oda {

namespace {

bool in_group(const Operator& op, const std::string& name) {
  return op.name() == name || op.config().name == name;
}

}  // namespace

OperatorManager::OperatorManager(QueryEngine& engine, ManagerHooks hooks, std::size_t workers,
                                 PluginRegistry& registry)
    : engine_(engine), hooks_(std::move(hooks)), registry_(registry), pool_(workers) {}

OperatorManager::~OperatorManager() {
  stop_scheduler();
  stop_all();
}

LoadReport OperatorManager::load_plugin(const std::string& plugin, std::string_view config_text) {
  const PluginInfo* info = registry_.find(plugin);
  if (info == nullptr) throw Error(ErrorCode::kUnknownPlugin, "unknown plugin '" + plugin + "'");

  auto configs = parse_plugin_config(config_text, plugin);
  if (configs.empty()) throw Error(ErrorCode::kConfigError, "plugin '" + plugin + "' defines no operators");

  auto tree = engine_.navigator();
  LoadReport report;
  report.plugin = plugin;
  std::vector<std::shared_ptr<Operator>> created;
  std::vector<Topic> declared;

  for (const auto& cfg : configs) {
    std::shared_ptr<Operator> probe = info->factory(cfg);
    // On-demand outputs only travel in the response, so they never become
    // sensors that a pipeline could consume.
    const bool declares = cfg.mode == OperatorMode::kOnline;
    if (probe->is_job_operator() || cfg.block_template.outputs.empty()) {
      // Job operators and operator-level-only templates have no static blocks.
      if (cfg.arrangement == Arrangement::kParallel)
        spdlog::warn("operator {}: no static blocks, running sequentially", cfg.name);
      probe->set_name(cfg.name);
      if (declares)
        for (const auto& name : cfg.block_template.operator_outputs)
          declared.push_back(probe->operator_output_topic(name));
      report.operators.emplace_back(probe->name(), 0);
      created.push_back(std::move(probe));
      continue;
    }

    InstantiationResult blocks;
    try {
      blocks = instantiate_blocks(*tree, cfg.block_template);
    } catch (const InstantiationError& e) {
      throw InstantiationError("operator " + cfg.name + ": " + e.what(), e.skipped());
    }
    report.skipped.insert(report.skipped.end(), blocks.skipped.begin(), blocks.skipped.end());

    if (cfg.arrangement == Arrangement::kParallel) {
      for (std::size_t k = 0; k < blocks.blocks.size(); ++k) {
        std::shared_ptr<Operator> op = k == 0 ? probe : std::shared_ptr<Operator>(info->factory(cfg));
        op->set_name(cfg.name + "@" + std::to_string(k));
        op->set_blocks({blocks.blocks[k]});
        if (declares) {
          auto topics = op->output_topics();
          declared.insert(declared.end(), topics.begin(), topics.end());
        }
        report.operators.emplace_back(op->name(), 1);
        created.push_back(std::move(op));
      }
    } else {
      probe->set_name(cfg.name);
      probe->set_blocks(std::move(blocks.blocks));
      if (declares) {
        auto topics = probe->output_topics();
        declared.insert(declared.end(), topics.begin(), topics.end());
      }
      report.operators.emplace_back(probe->name(), probe->blocks().size());
      created.push_back(std::move(probe));
    }
  }

  if (created.empty()) throw Error(ErrorCode::kConfigError, "plugin '" + plugin + "' created no operators");

  std::vector<std::shared_ptr<Operator>> old;
  {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(plugins_.begin(), plugins_.end(),
                           [&](const auto& p) { return p.first == plugin; });
    if (it != plugins_.end()) {
      old = std::move(it->second);
      plugins_.erase(it);
      report.replaced = true;
    }
  }
  for (auto& op : old) {
    op->set_state(OperatorState::kStopped);
    std::lock_guard wait(op->compute_mutex());
  }
  {
    std::lock_guard lock(mutex_);
    for (auto& op : old) {
      last_tick_.erase(op.get());
      next_due_.erase(op.get());
      in_flight_.erase(op.get());
    }
    for (auto& op : created) in_flight_[op.get()] = std::make_shared<std::atomic<bool>>(false);
    plugins_.emplace_back(plugin, std::move(created));
  }
  if (hooks_.declare_outputs && !declared.empty()) hooks_.declare_outputs(declared);
  spdlog::info("loaded plugin {} with {} operator(s)", plugin, report.operators.size());
  return report;
}

void OperatorManager::unload_plugin(const std::string& plugin) {
  std::vector<std::shared_ptr<Operator>> ops;
  {
    std::lock_guard lock(mutex_);
    auto it = std::find_if(plugins_.begin(), plugins_.end(),
                           [&](const auto& p) { return p.first == plugin; });
    if (it == plugins_.end()) throw Error(ErrorCode::kUnknownPlugin, "plugin '" + plugin + "' is not loaded");
    ops = std::move(it->second);
    plugins_.erase(it);
    for (auto& op : ops) {
      last_tick_.erase(op.get());
      next_due_.erase(op.get());
      in_flight_.erase(op.get());
    }
  }
  for (auto& op : ops) {
    op->set_state(OperatorState::kStopped);
    std::lock_guard wait(op->compute_mutex());
  }
}

std::vector<std::string> OperatorManager::loaded_plugins() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, _] : plugins_) out.push_back(name);
  return out;
}

std::vector<std::shared_ptr<Operator>> OperatorManager::find_group(const std::string& plugin,
                                                                   const std::string& op) const {
  std::lock_guard lock(mutex_);
  auto it = std::find_if(plugins_.begin(), plugins_.end(),
                         [&](const auto& p) { return p.first == plugin; });
  if (it == plugins_.end()) throw Error(ErrorCode::kUnknownPlugin, "plugin '" + plugin + "' is not loaded");
  std::vector<std::shared_ptr<Operator>> out;
  for (const auto& o : it->second)
    if (in_group(*o, op)) out.push_back(o);
  if (out.empty())
    throw Error(ErrorCode::kUnknownOperator, "plugin '" + plugin + "' has no operator '" + op + "'");
  return out;
}

std::shared_ptr<Operator> OperatorManager::find(const std::string& plugin,
                                                const std::string& op) const {
  std::lock_guard lock(mutex_);
  for (const auto& [name, ops] : plugins_) {
    if (name != plugin) continue;
    for (const auto& o : ops)
      if (o->name() == op) return o;
  }
  return nullptr;
}

void OperatorManager::start(const std::string& plugin, const std::string& op) {
  auto group = find_group(plugin, op);
  {
    std::lock_guard lock(mutex_);
    for (auto& o : group) {
      o->set_state(OperatorState::kRunning);
      next_due_.erase(o.get());
    }
  }
  scheduler_cv_.notify_all();
}

void OperatorManager::stop(const std::string& plugin, const std::string& op) {
  auto group = find_group(plugin, op);
  for (auto& o : group) o->set_state(OperatorState::kStopped);
  for (auto& o : group) std::lock_guard wait(o->compute_mutex());
}

void OperatorManager::start_all() {
  {
    std::lock_guard lock(mutex_);
    for (auto& [_, ops] : plugins_)
      for (auto& o : ops) o->set_state(OperatorState::kRunning);
    next_due_.clear();
  }
  scheduler_cv_.notify_all();
}

void OperatorManager::stop_all() {
  std::vector<std::shared_ptr<Operator>> all;
  {
    std::lock_guard lock(mutex_);
    for (auto& [_, ops] : plugins_) all.insert(all.end(), ops.begin(), ops.end());
  }
  for (auto& o : all) o->set_state(OperatorState::kStopped);
  for (auto& o : all) std::lock_guard wait(o->compute_mutex());
}

void OperatorManager::set_epoch(Timestamp epoch) {
  {
    std::lock_guard lock(mutex_);
    epoch_ = epoch;
    next_due_.clear();
  }
  scheduler_cv_.notify_all();
}

Timestamp OperatorManager::epoch() const {
  std::lock_guard lock(mutex_);
  return epoch_;
}

std::vector<Block> OperatorManager::build_job_blocks(const Operator& op,
                                                     const std::vector<JobInfo>& jobs) const {
  auto tree = engine_.navigator();
  std::vector<Block> blocks;
  for (const auto& job : jobs) {
    std::string reason;
    auto block = instantiate_job_block(*tree, op.config().block_template, job.job_id, job.node_list,
                                       op.config().job_output_prefix, &reason);
    if (block) {
      blocks.push_back(std::move(*block));
    } else {
      spdlog::debug("operator {}: job {} skipped: {}", op.name(), job.job_id, reason);
    }
  }
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.name < b.name; });
  return blocks;
}

void OperatorManager::run_tick(Operator& op, Timestamp now, bool blocking) {
  std::unique_lock compute(op.compute_mutex(), std::defer_lock);
  if (blocking) {
    compute.lock();
  } else if (!compute.try_lock()) {
    op.count_skip();
    return;
  }
  if (op.state() != OperatorState::kRunning) return;
  {
    std::lock_guard lock(mutex_);
    auto it = last_tick_.find(&op);
    if (it != last_tick_.end() && now <= it->second) {
      op.count_skip();
      return;
    }
    last_tick_[&op] = now;
  }

  if (op.is_job_operator()) {
    std::vector<JobInfo> jobs;
    try {
      jobs = engine_.jobs(now);
    } catch (const Error& e) {
      spdlog::warn("operator {}: {}", op.name(), e.what());
    }
    auto previous = op.blocks();
    op.set_blocks(build_job_blocks(op, jobs));
    std::vector<Topic> fresh;
    for (const auto& b : op.blocks()) {
      bool known = std::any_of(previous.begin(), previous.end(),
                               [&](const Block& p) { return p.name == b.name; });
      if (known) continue;
      auto topics = op.block_outputs(b);
      fresh.insert(fresh.end(), topics.begin(), topics.end());
    }
    if (hooks_.declare_outputs && !fresh.empty()) hooks_.declare_outputs(fresh);
  }

  ComputeContext ctx(engine_, op, now, false);
  op.compute_all(ctx);
  op.count_tick();
  auto outputs = ctx.take_outputs();
  if (hooks_.publish && !outputs.empty()) hooks_.publish(op, std::move(outputs));
}

void OperatorManager::tick(const std::string& plugin, const std::string& op, Timestamp now) {
  auto group = find_group(plugin, op);
  if (group.size() == 1) {
    run_tick(*group.front(), now, true);
    return;
  }
  std::vector<std::future<void>> pending;
  for (auto& o : group) pending.push_back(pool_.submit([this, o, now] { run_tick(*o, now, true); }));
  for (auto& f : pending) f.get();
}

void OperatorManager::tick_due(Timestamp now) {
  std::vector<std::vector<std::shared_ptr<Operator>>> batches;
  Timestamp epoch;
  {
    std::lock_guard lock(mutex_);
    epoch = epoch_;
    for (const auto& [_, ops] : plugins_) {
      const std::string* current = nullptr;
      for (const auto& o : ops) {
        const auto& cfg = o->config();
        if (cfg.mode != OperatorMode::kOnline || o->state() != OperatorState::kRunning) continue;
        if (now < epoch || cfg.interval_ns == 0 || (now - epoch) % cfg.interval_ns != 0) continue;
        if (current == nullptr || *current != cfg.name) {
          batches.emplace_back();
          current = &cfg.name;
        }
        batches.back().push_back(o);
      }
    }
  }
  for (auto& batch : batches) {
    if (batch.size() == 1) {
      run_tick(*batch.front(), now, true);
      continue;
    }
    std::vector<std::future<void>> pending;
    for (auto& o : batch) pending.push_back(pool_.submit([this, o, now] { run_tick(*o, now, true); }));
    for (auto& f : pending) f.get();
  }
}

std::vector<OutputReading> OperatorManager::on_demand(const std::string& plugin,
                                                      const std::string& op,
                                                      const std::string& block, Timestamp now) {
  auto group = find_group(plugin, op);
  const auto& cfg = group.front()->config();
  if (cfg.mode != OperatorMode::kOnDemand)
    throw Error(ErrorCode::kWrongMode, "operator '" + op + "' is not on-demand");

  std::vector<std::string> candidates = {block};
  std::string trimmed = block;
  while (!trimmed.empty() && trimmed.front() == '/') trimmed.erase(trimmed.begin());
  while (!trimmed.empty() && trimmed.back() == '/') trimmed.pop_back();
  candidates.push_back("/" + trimmed + "/");
  candidates.push_back(trimmed);

  std::shared_ptr<Operator> target;
  std::optional<Block> resolved;
  for (auto& o : group) {
    if (o->is_job_operator()) {
      target = o;
      break;
    }
    for (const auto& c : candidates) {
      if (const Block* b = o->find_block(c)) {
        target = o;
        resolved = *b;
        break;
      }
    }
    if (target) break;
  }
  if (!target) target = group.front();
  if (target->state() != OperatorState::kRunning)
    throw Error(ErrorCode::kNotRunning, "operator '" + op + "' is not running");

  if (target->is_job_operator()) {
    auto jobs = engine_.jobs(now);
    for (const auto& c : candidates) {
      auto it = std::find_if(jobs.begin(), jobs.end(), [&](const JobInfo& j) { return j.job_id == c; });
      if (it == jobs.end()) continue;
      auto blocks = build_job_blocks(*target, {*it});
      if (!blocks.empty()) resolved = blocks.front();
      break;
    }
  }
  if (!resolved) throw Error(ErrorCode::kUnknownBlock, "operator '" + op + "' has no block '" + block + "'");

  std::lock_guard compute(target->compute_mutex());
  ComputeContext ctx(engine_, *target, now, true);
  target->compute(*resolved, ctx);
  return ctx.take_outputs();
}

std::string OperatorManager::custom_action(const std::string& plugin, const std::string& op,
                                           const std::string& action,
                                           const std::map<std::string, std::string>& params,
                                           Timestamp now) {
  auto group = find_group(plugin, op);
  std::string result;
  for (auto& o : group) {
    std::lock_guard compute(o->compute_mutex());
    ComputeContext ctx(engine_, *o, now, o->config().mode == OperatorMode::kOnDemand);
    auto r = o->custom_action(action, params, ctx);
    if (!result.empty() && !r.empty()) result += "\n";
    result += r;
    auto outputs = ctx.take_outputs();
    if (o->config().mode == OperatorMode::kOnline && hooks_.publish && !outputs.empty())
      hooks_.publish(*o, std::move(outputs));
  }
  return result;
}

std::vector<OperatorStatus> OperatorManager::list() const {
  std::lock_guard lock(mutex_);
  std::vector<OperatorStatus> out;
  for (const auto& [plugin, ops] : plugins_) {
    for (const auto& o : ops) {
      OperatorStatus s;
      s.plugin = plugin;
      s.name = o->name();
      s.mode = o->config().mode;
      s.arrangement = o->config().arrangement;
      s.state = o->state();
      s.job_operator = o->is_job_operator();
      s.blocks = o->blocks().size();
      s.ticks = o->ticks();
      s.skipped = o->skipped_ticks();
      s.failures = o->failures();
      out.push_back(std::move(s));
    }
  }
  return out;
}

void OperatorManager::start_scheduler() {
  std::lock_guard lock(mutex_);
  if (scheduler_running_) return;
  scheduler_running_ = true;
  scheduler_ = std::thread([this] { scheduler_loop(); });
}

void OperatorManager::stop_scheduler() {
  {
    std::lock_guard lock(mutex_);
    if (!scheduler_running_) return;
    scheduler_running_ = false;
  }
  scheduler_cv_.notify_all();
  if (scheduler_.joinable()) scheduler_.join();
}

void OperatorManager::scheduler_loop() {
  std::unique_lock lock(mutex_);
  while (scheduler_running_) {
    Timestamp now = wall_now();
    std::optional<Timestamp> earliest;
    std::vector<std::pair<std::shared_ptr<Operator>, Timestamp>> due;

    for (const auto& [_, ops] : plugins_) {
      for (const auto& o : ops) {
        const auto& cfg = o->config();
        if (cfg.mode != OperatorMode::kOnline || o->state() != OperatorState::kRunning) continue;
        if (cfg.interval_ns == 0) continue;
        auto [it, inserted] = next_due_.try_emplace(o.get(), next_aligned(epoch_, cfg.interval_ns, now));
        if (it->second <= now) {
          due.emplace_back(o, it->second);
          it->second = next_aligned(epoch_, cfg.interval_ns, now);
        }
        if (!earliest || it->second < *earliest) earliest = it->second;
      }
    }

    for (auto& [o, t] : due) {
      auto flag = in_flight_[o.get()];
      if (!flag) flag = in_flight_[o.get()] = std::make_shared<std::atomic<bool>>(false);
      if (flag->exchange(true)) {
        o->count_skip();
        continue;
      }
      pool_.submit([this, o, t, flag] {
        try {
          run_tick(*o, t, false);
        } catch (const std::exception& e) {
          spdlog::error("operator {}: tick failed: {}", o->name(), e.what());
        }
        flag->store(false);
      });
    }

    if (earliest) {
      scheduler_cv_.wait_until(lock, to_time_point(*earliest));
    } else {
      scheduler_cv_.wait(lock);
    }
  }
}

}  // namespace oda
