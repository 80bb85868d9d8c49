// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line entry point: the two daemons, the case-study harness and a
// dry-run block resolver.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "odaframe/blocks/block_engine.hpp"
#include "odaframe/daemon/daemon_config.hpp"
#include "odaframe/daemon/daemons.hpp"
#include "odaframe/daemon/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw oda::Error(oda::ErrorCode::kIoError, path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_blocks(const std::string& topics_file, const std::string& template_file,
               const std::vector<std::string>& levels) {
  std::ifstream in(topics_file);
  if (!in) throw oda::Error(oda::ErrorCode::kIoError, topics_file + ": cannot open");
  const auto topics = oda::read_topic_dump(in);
  std::optional<oda::HierarchySpec> spec;
  if (!levels.empty()) spec = oda::HierarchySpec{levels};
  const auto built = oda::build_tree(std::span<const std::string>(topics), spec);
  for (const auto& r : built.rejected) std::cerr << "rejected " << r.topic << ": " << r.reason << "\n";

  const auto tmpl = oda::parse_template(read_file(template_file));
  const auto result = oda::instantiate_blocks(built.tree, tmpl);
  for (const auto& b : result.blocks) {
    std::cout << "block " << b.name << "\n";
    for (const auto& t : b.input_topics) std::cout << "  in  " << t << "\n";
    for (const auto& t : b.output_topics) std::cout << "  out " << t << "\n";
  }
  for (const auto& s : result.skipped) std::cout << "skipped " << s.name << ": " << s.reason << "\n";
  std::cout << result.blocks.size() << " blocks\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"odaframe: online operational data analytics"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error")->capture_default_str();

  std::string config_path;
  auto* pusher = app.add_subcommand("pusher", "Run a pusher daemon");
  pusher->add_option("--config", config_path, "Configuration file")->required();
  auto* collector = app.add_subcommand("collector", "Run a collector daemon");
  collector->add_option("--config", config_path, "Configuration file")->required();

  std::string case_name;
  std::uint64_t seed = 1;
  std::string out_dir = "scenario-out";
  auto* scenario = app.add_subcommand("scenario", "Run a case study and write its CSVs");
  scenario->add_option("--case", case_name, "power, jobs, clustering or overhead")
      ->required()
      ->check(CLI::IsMember({"power", "jobs", "clustering", "overhead"}));
  scenario->add_option("--seed", seed, "Random seed")->capture_default_str();
  scenario->add_option("--out", out_dir, "Output directory")->capture_default_str();

  std::string topics_file, template_file;
  std::vector<std::string> levels;
  auto* blocks = app.add_subcommand("blocks", "Print the blocks a template resolves to");
  blocks->add_option("--topics", topics_file, "Topic dump, one per line")->required();
  blocks->add_option("--template", template_file, "Block template")->required();
  blocks->add_option("--level", levels, "Hierarchy level regex, repeatable");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*pusher || *collector) {
      const auto cfg = oda::load_daemon_config(config_path);
      const auto want = *pusher ? oda::DaemonRole::kPusher : oda::DaemonRole::kCollector;
      if (cfg.role != want) {
        std::cerr << config_path << ": role is " << oda::to_string(cfg.role) << ", expected "
                  << oda::to_string(want) << "\n";
        return 2;
      }
      return oda::run_daemon(cfg);
    }
    if (*scenario) {
      const auto metrics = oda::run_scenario(*oda::parse_case_study(case_name), seed, out_dir);
      for (const auto& [k, v] : metrics) std::cout << k << " " << v << "\n";
      return 0;
    }
    if (*blocks) return run_blocks(topics_file, template_file, levels);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
