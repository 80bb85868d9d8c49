// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "odaframe/blocks/block_engine.hpp"
#include "odaframe/common/config_text.hpp"
#include "odaframe/query/query_engine.hpp"

namespace oda {

enum class OperatorMode { kOnline, kOnDemand };
enum class Arrangement { kSequential, kParallel };
enum class OperatorState { kStopped, kRunning };

std::string_view to_string(OperatorMode mode);
std::string_view to_string(Arrangement arrangement);
std::string_view to_string(OperatorState state);

/// Fractional plugin outputs are stored as value * kFixedPointScale.
inline constexpr double kFixedPointScale = 1000.0;

std::int64_t to_fixed_point(double value);
double from_fixed_point(std::int64_t value);

struct OperatorConfig {
  std::string name;
  std::string plugin;
  OperatorMode mode = OperatorMode::kOnline;
  Duration interval_ns = kNsPerSec;
  Arrangement arrangement = Arrangement::kSequential;
  BlockTemplate block_template;
  /// Publish online outputs to the transport (pusher) or store (collector).
  bool streaming = true;
  /// Job operators name their outputs <job_output_prefix>/<job id>/<sensor>.
  std::string job_output_prefix = "/jobs";
  /// Operator-level outputs live under this prefix; defaults to /oda/<name>.
  std::string operator_output_prefix;
  /// The whole operator section, for plugin-specific keys.
  ConfigNode params;
};

/// Parses an operator section (`operator NAME { ... }`). Keys from `defaults`
/// apply unless the section overrides them. Throws ParseError.
OperatorConfig parse_operator_config(const ConfigNode& section, const std::string& plugin,
                                     const ConfigNode* defaults = nullptr);

/// Parses a plugin configuration file: an optional `defaults { }` section
/// followed by `operator NAME { }` sections. Throws ParseError.
std::vector<OperatorConfig> parse_plugin_config(std::string_view text, const std::string& plugin);

/// Renders an OperatorConfig back to its section form.
ConfigNode operator_config_to_node(const OperatorConfig& config);

struct OutputReading {
  Topic topic;
  SensorReading reading;

  friend bool operator==(const OutputReading&, const OutputReading&) = default;
};

class Operator;

/// What a plugin sees during one computation.
class ComputeContext {
 public:
  ComputeContext(const QueryEngine& engine, const Operator& op, Timestamp now, bool on_demand)
      : engine_(engine), op_(op), now_(now), on_demand_(on_demand) {}

  Timestamp now() const noexcept { return now_; }
  bool on_demand() const noexcept { return on_demand_; }
  const QueryEngine& engine() const noexcept { return engine_; }
  const Operator& op() const noexcept { return op_; }

  std::vector<SensorReading> query_relative(const Topic& topic, Duration offset) const;
  std::vector<SensorReading> query_absolute(const Topic& topic, Timestamp t0, Timestamp t1) const;
  /// Newest reading, or nullopt when the sensor has none yet.
  std::optional<SensorReading> latest(const Topic& topic) const;

  void emit(const Topic& topic, std::int64_t value);
  void emit_operator_output(std::string_view sensor_name, std::int64_t value);

  const std::vector<OutputReading>& outputs() const noexcept { return outputs_; }
  std::vector<OutputReading> take_outputs() { return std::move(outputs_); }

 private:
  const QueryEngine& engine_;
  const Operator& op_;
  Timestamp now_;
  bool on_demand_;
  std::vector<OutputReading> outputs_;
};

/// Base class of every operator plugin. An operator owns a set of blocks and
/// computes over them; the manager guarantees a compute never overlaps with
/// another compute of the same operator.
class Operator {
 public:
  explicit Operator(OperatorConfig config);
  virtual ~Operator() = default;

  Operator(const Operator&) = delete;
  Operator& operator=(const Operator&) = delete;

  const OperatorConfig& config() const noexcept { return config_; }
  /// Instance name; parallel instances are "<config name>@<index>".
  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  void set_blocks(std::vector<Block> blocks) { blocks_ = std::move(blocks); }
  const Block* find_block(std::string_view name) const;

  /// Block outputs plus operator-level outputs.
  std::vector<Topic> output_topics() const;
  Topic operator_output_topic(std::string_view sensor_name) const;

  OperatorState state() const noexcept { return state_.load(); }
  void set_state(OperatorState s) noexcept { state_.store(s); }

  std::mutex& compute_mutex() const noexcept { return compute_mutex_; }

  // --- plugin interface --------------------------------------------------

  virtual bool is_job_operator() const { return false; }
  /// Topics the operator writes for `block`; defaults to its output topics.
  virtual std::vector<Topic> block_outputs(const Block& block) const { return block.output_topics; }
  /// One analysis step for one block.
  virtual void compute(const Block& block, ComputeContext& ctx) = 0;
  /// One analysis step for all blocks, in order. A block that throws is
  /// logged and counted; the others still run.
  virtual void compute_all(ComputeContext& ctx);
  virtual std::vector<std::string> custom_actions() const { return {}; }
  /// Throws Error(kUnknownAction) unless the plugin declares `action`.
  virtual std::string custom_action(const std::string& action,
                                    const std::map<std::string, std::string>& params,
                                    ComputeContext& ctx);

  // --- statistics --------------------------------------------------------

  std::uint64_t ticks() const noexcept { return ticks_.load(); }
  std::uint64_t skipped_ticks() const noexcept { return skipped_.load(); }
  std::uint64_t failures() const noexcept { return failures_.load(); }
  void count_tick() noexcept { ticks_.fetch_add(1); }
  void count_skip() noexcept { skipped_.fetch_add(1); }
  void count_failure() noexcept { failures_.fetch_add(1); }

 protected:
  /// Runs compute() for one block with failure isolation.
  void compute_guarded(const Block& block, ComputeContext& ctx);

 private:
  OperatorConfig config_;
  std::string name_;
  std::vector<Block> blocks_;
  std::atomic<OperatorState> state_{OperatorState::kStopped};
  mutable std::mutex compute_mutex_;
  std::atomic<std::uint64_t> ticks_{0};
  std::atomic<std::uint64_t> skipped_{0};
  std::atomic<std::uint64_t> failures_{0};
};

}  // namespace oda
