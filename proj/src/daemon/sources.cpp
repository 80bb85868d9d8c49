// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/daemon/sources.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "odaframe/common/error.hpp"
#include "odaframe/plugins/tester.hpp"

namespace oda {

FileReplaySource::FileReplaySource(const std::filesystem::path& file, Duration interval)
    : interval_(interval) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::kConfigError, file.string() + ": cannot open replay file");
  std::map<std::string, std::size_t> ids;
  struct Raw {
    Timestamp ts;
    std::size_t topic;
    std::int64_t value;
  };
  std::vector<Raw> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    auto bad = [&](const std::string& why) {
      throw Error(ErrorCode::kConfigError, file.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (c2 == std::string::npos) bad("expected topic,timestamp,value");
    const std::string topic = line.substr(0, c1);
    if (!Topic::is_valid(topic)) bad("invalid topic '" + topic + "'");
    Raw r{};
    try {
      r.ts = std::stoull(line.substr(c1 + 1, c2 - c1 - 1));
      r.value = std::stoll(line.substr(c2 + 1));
    } catch (const std::exception&) {
      bad("malformed number");
    }
    auto [it, added] = ids.emplace(topic, topics_.size());
    if (added) topics_.emplace_back(topic);
    r.topic = it->second;
    raw.push_back(r);
  }
  std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.ts < b.ts; });
  const Timestamp first = raw.empty() ? 0 : raw.front().ts;
  records_.reserve(raw.size());
  for (const auto& r : raw) records_.push_back({r.ts - first, r.topic, r.value});
}

void FileReplaySource::sample(Timestamp now, const Sink& sink) {
  if (!start_) start_ = now;
  const Duration elapsed = now - *start_;
  while (next_ < records_.size() && records_[next_].offset <= elapsed) {
    const auto& r = records_[next_++];
    sink(r.topic, {r.value, *start_ + r.offset});
  }
}

std::unique_ptr<SensorSource> make_source(const SourceConfig& config, Duration default_interval) {
  Duration interval = default_interval;
  const auto* iv = config.params.child("interval_ms");
  std::int64_t ms = 0;
  try {
    ms = config.params.get_int("interval_ms", 0);
  } catch (const ParseError& e) {
    throw Error(ErrorCode::kConfigError, "line " + std::to_string(e.line()) + ": " + e.reason());
  }
  if (iv) {
    if (ms <= 0) throw Error(ErrorCode::kConfigError, "source interval_ms must be positive");
    interval = static_cast<Duration>(ms) * kNsPerMs;
  }
  if (config.type == "tester") {
    const auto sensors = config.params.get_int("sensors", 1000);
    if (sensors <= 0) throw Error(ErrorCode::kConfigError, "tester needs at least one sensor");
    return std::make_unique<TesterSource>(config.params.get_or("prefix", "/tester"),
                                          static_cast<std::size_t>(sensors), interval);
  }
  if (config.type == "replay") {
    const auto file = config.params.get("file");
    if (!file) throw Error(ErrorCode::kConfigError, "replay source needs 'file'");
    return std::make_unique<FileReplaySource>(*file, interval);
  }
  throw Error(ErrorCode::kConfigError, "unknown source type '" + config.type + "'");
}

}  // namespace oda
