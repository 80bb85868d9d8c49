// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <thread>

#include <spdlog/spdlog.h>

#include "odaframe/api/rest_api.hpp"
#include "odaframe/blocks/block_engine.hpp"
#include "odaframe/common/error.hpp"
#include "odaframe/daemon/daemon_config.hpp"
#include "odaframe/daemon/daemons.hpp"
#include "odaframe/daemon/scenario.hpp"
#include "odaframe/plugins/deciles.hpp"
#include "odaframe/plugins/gaussian_mixture.hpp"
#include "odaframe/sensor/sensor_cache.hpp"
#include "odaframe/transport/frame.hpp"
#include "odaframe/transport/pubsub.hpp"
#include "support/oracles.hpp"

// After Eigen (via the oracles): <resolv.h> defines a macro named _res.
#include <httplib.h>

namespace oda {
namespace {

using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("odaframe-accept-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

template <typename Pred>
bool wait_for(Pred pred, std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (!pred()) {
    if (Clock::now() > deadline) return false;
    std::this_thread::sleep_for(10ms);
  }
  return true;
}

std::vector<std::string> strs(const std::vector<Topic>& ts) {
  std::vector<std::string> out;
  for (const auto& t : ts) out.push_back(t.str());
  return out;
}

// 1. The worked example over the example system.
Outcome worked_example() {
  const auto topics = testing::example_system_topics();
  const auto tree = build_tree(std::span<const std::string>(topics)).tree;
  const auto result = instantiate_blocks(tree, parse_template(testing::kExampleTemplate));
  if (result.blocks.size() != 4) return {false, std::to_string(result.blocks.size()) + " blocks"};
  std::vector<std::string> names;
  for (const auto& b : result.blocks) names.push_back(b.name);
  if (names != std::vector<std::string>{"/r03/c02/s01/", "/r03/c02/s02/", "/r03/c02/s03/", "/r03/c02/s04/"})
    return {false, "unexpected block names"};
  const auto& s02 = result.blocks[1];
  std::set<std::string> got;
  for (const auto& t : s02.input_topics) got.insert(t.str());
  const std::set<std::string> expected = {"/r03/c02/power", "/r03/c02/s02/cpu0/cpu-cycles",
                                          "/r03/c02/s02/cpu1/cpu-cycles", "/r03/c02/s02/cpu0/cache-misses",
                                          "/r03/c02/s02/cpu1/cache-misses"};
  if (got != expected || got.size() != s02.input_topics.size()) return {false, "s02 inputs differ"};
  if (strs(s02.output_topics) != std::vector<std::string>{"/r03/c02/s02/healthy"})
    return {false, "s02 outputs differ"};
  return {true, "4 blocks, s02 resolved exactly"};
}

// 2. Resolution against the brute-force enumeration.
Outcome resolution_oracle() {
  std::mt19937_64 rng(20260101);
  std::size_t agree = 0;
  std::size_t instantiated = 0;
  constexpr std::size_t kRounds = 1000;
  for (std::size_t round = 0; round < kRounds; ++round) {
    const auto topics = testing::random_topics(rng, 200);
    const auto tree = build_tree(std::span<const std::string>(topics)).tree;
    const auto tmpl = testing::random_template(rng);
    const auto oracle = testing::brute_force_blocks(topics, tmpl);
    bool ok = true;
    for (const auto& e : tmpl.inputs) ok = ok && strs(expression_domain(tree, e)) == testing::brute_force_domain(topics, e);
    try {
      const auto result = instantiate_blocks(tree, tmpl);
      std::vector<std::string> skipped;
      for (const auto& s : result.skipped) skipped.push_back(s.name);
      ok = ok && result.blocks == oracle.blocks && skipped == oracle.skipped;
      ++instantiated;
    } catch (const InstantiationError&) {
      ok = ok && oracle.blocks.empty();
    }
    agree += ok ? 1 : 0;
  }
  return {agree == kRounds, std::to_string(agree) + "/" + std::to_string(kRounds) + " agree (" +
                                std::to_string(instantiated) + " instantiated)"};
}

// 3. Relative and absolute cache views against each other and a linear scan.
Outcome cache_modes() {
  std::mt19937_64 rng(33);
  constexpr int kStates = 10'000;
  std::size_t checks = 0;
  for (int c = 0; c < kStates; ++c) {
    const Duration nominal = std::uniform_int_distribution<Duration>(1, 2000)(rng) * kNsPerMs;
    const Duration capacity = nominal * std::uniform_int_distribution<Duration>(1, 200)(rng);
    SensorCache cache(capacity, nominal);
    std::vector<SensorReading> stores;
    Timestamp t = std::uniform_int_distribution<Timestamp>(0, 1000 * kNsPerSec)(rng);
    const int n = std::uniform_int_distribution<int>(0, 600)(rng);
    const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < n; ++i) {
      Duration step = nominal;
      if (kind == 1) step = std::uniform_int_distribution<Duration>(0, 2 * nominal)(rng);
      if (kind == 2) step = std::uniform_int_distribution<Duration>(0, nominal / 20 + 1)(rng);
      if (kind == 3 && std::uniform_int_distribution<int>(0, 9)(rng) == 0 && t > nominal) {
        stores.push_back({static_cast<std::int64_t>(rng()), t - nominal});
      } else {
        t += step;
        stores.push_back({static_cast<std::int64_t>(rng()), t});
      }
      cache.store(stores.back());
    }
    const auto model = testing::cache_model(stores, capacity);
    const auto snapshot = cache.snapshot();
    if (snapshot != model.retained) return {false, "state " + std::to_string(c) + ": retained set differs"};
    for (int q = 0; q < 4; ++q) {
      const Duration offset = std::uniform_int_distribution<Duration>(0, capacity + 5 * nominal)(rng);
      const auto rel = cache.view_relative(offset);
      if (rel != testing::scan_relative(snapshot, offset))
        return {false, "state " + std::to_string(c) + ": relative view differs from scan"};
      if (!snapshot.empty()) {
        const Timestamp newest = snapshot.back().timestamp;
        if (rel != cache.view_absolute(newest > offset ? newest - offset : 0, newest))
          return {false, "state " + std::to_string(c) + ": relative and absolute views disagree"};
      }
      const Timestamp lo = snapshot.empty() ? 0 : snapshot.front().timestamp;
      const Timestamp hi = snapshot.empty() ? kNsPerSec : snapshot.back().timestamp;
      Timestamp t0 = std::uniform_int_distribution<Timestamp>(lo > nominal ? lo - nominal : 0, hi + nominal)(rng);
      Timestamp t1 = std::uniform_int_distribution<Timestamp>(lo > nominal ? lo - nominal : 0, hi + nominal)(rng);
      if (t0 > t1) std::swap(t0, t1);
      if (cache.view_absolute(t0, t1) != testing::scan_absolute(snapshot, t0, t1))
        return {false, "state " + std::to_string(c) + ": absolute view differs from scan"};
      checks += 3;
    }
  }
  return {true, std::to_string(kStates) + " states, " + std::to_string(checks) + " checks exact"};
}

// 4. Deciles against a sort-based oracle.
Outcome deciles_oracle() {
  std::mt19937_64 rng(44);
  double worst = 0.0;
  constexpr int kVectors = 1000;
  for (int v = 0; v < kVectors; ++v) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 3000)(rng);
    if (v % 10 == 0) n = 2048;
    std::vector<double> values(n);
    std::normal_distribution<double> dist(std::uniform_real_distribution<double>(-5.0, 5.0)(rng), 2.0);
    for (auto& x : values) x = dist(rng);
    if (v % 7 == 0)
      for (auto& x : values) x = std::round(x);  // ties
    const auto got = deciles(values);
    const auto want = testing::sorted_deciles(values);
    for (std::size_t k = 0; k < got.size(); ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d vectors, max |error| %.3g", kVectors, worst);
  return {worst <= 1e-9, buf};
}

// 5. Power prediction on the synthetic signal.
Outcome regressor() {
  const auto r = run_power_scenario(PowerScenario{});
  if (!r.trained_at || r.predictions.empty()) return {false, "model never trained"};
  std::size_t out_of_range = 0;
  for (const auto& p : r.predictions)
    if (p.predicted_w < r.response_min_w - 1e-9 || p.predicted_w > r.response_max_w + 1e-9) ++out_of_range;
  char buf[160];
  std::snprintf(buf, sizeof buf, "mean relative error %.4f over %zu predictions, %zu outside [%.1f, %.1f] W",
                r.mean_relative_error, r.predictions.size(), out_of_range, r.response_min_w, r.response_max_w);
  return {r.mean_relative_error <= 0.15 && out_of_range == 0, buf};
}

// 6. Clustering of three groups plus injected outliers.
Outcome clustering() {
  const auto r = run_clustering_scenario(ClusteringScenario{});
  std::vector<int> labels;
  std::vector<int> truth;
  std::size_t outliers = 0;
  std::size_t flagged = 0;
  for (const auto& n : r.nodes) {
    labels.push_back(n.label);
    truth.push_back(n.truth);
    if (n.truth < 0) {
      ++outliers;
      flagged += n.label == kOutlierLabel ? 1 : 0;
    }
  }
  const double agreement = testing::permutation_agreement(labels, truth);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu components, agreement %.4f, %zu/%zu outliers flagged", r.components,
                agreement, flagged, outliers);
  return {r.components == 3 && agreement >= 0.95 && outliers > 0 && flagged == outliers, buf};
}

// 7. Two-stage CPI pipeline against the offline oracle.
Outcome pipeline() {
  const JobsScenario sc;
  const auto r = run_jobs_scenario(sc);
  const auto oracle = testing::cpi_decile_oracle(r, sc.perf_interval);
  if (r.deciles.size() != oracle.size())
    return {false, std::to_string(r.deciles.size()) + " rows vs " + std::to_string(oracle.size()) + " expected"};
  double worst = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    if (r.deciles[i].time != oracle[i].time || r.deciles[i].job_id != oracle[i].job_id)
      return {false, "row " + std::to_string(i) + " is for a different tick or job"};
    for (std::size_t k = 0; k < oracle[i].deciles.size(); ++k)
      worst = std::max(worst, std::abs(static_cast<double>(r.deciles[i].deciles[k]) - oracle[i].deciles[k]));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu rows tick-for-tick, max deviation %.3f fixed-point units", oracle.size(),
                worst);
  // Fixed-point outputs round to the nearest unit.
  return {!oracle.empty() && worst <= 0.5 + 1e-9, buf};
}

// A source emitting `samples` rounds of random values for `topics` sensors and
// remembering every reading it emitted.
class RecordingSource : public SensorSource {
 public:
  RecordingSource(std::size_t topics, std::size_t samples, Duration interval)
      : samples_(samples), interval_(interval), sent_(topics), rng_(88) {
    for (std::size_t i = 0; i < topics; ++i) topics_.emplace_back("/n" + std::to_string(i % 10) + "/s" + std::to_string(i));
  }
  std::string name() const override { return "recording"; }
  const std::vector<Topic>& topics() const override { return topics_; }
  Duration interval() const override { return interval_; }
  void sample(Timestamp now, const Sink& sink) override {
    std::lock_guard lock(mutex_);
    if (rounds_ == samples_) return;
    ++rounds_;
    for (std::size_t i = 0; i < topics_.size(); ++i) {
      const SensorReading r{static_cast<std::int64_t>(rng_()), now};
      sent_[i].push_back(r);
      sink(i, r);
    }
  }
  bool done() {
    std::lock_guard lock(mutex_);
    return rounds_ == samples_;
  }
  const std::vector<std::vector<SensorReading>>& sent() const { return sent_; }

 private:
  std::vector<Topic> topics_;
  std::size_t samples_;
  Duration interval_;
  std::vector<std::vector<SensorReading>> sent_;
  std::mt19937_64 rng_;
  std::mutex mutex_;
  std::size_t rounds_ = 0;
};

std::size_t fuzz_decoder(std::size_t cases) {
  std::mt19937_64 rng(808);
  std::size_t rejected = 0;
  for (std::size_t c = 0; c < cases; ++c) {
    std::vector<SensorReading> rs(1 + rng() % 8);
    for (auto& r : rs) r = {static_cast<std::int64_t>(rng()), rng()};
    auto bytes = encode_frame(Topic("/f/" + std::to_string(rng() % 1000)), rs);
    switch (c % 3) {
      case 0:
        for (int i = 0; i < 3; ++i) bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
        break;
      case 1:
        bytes.resize(rng() % bytes.size());
        break;
      default:
        bytes.resize(rng() % 64);
        for (auto& b : bytes) b = static_cast<std::uint8_t>(rng());
    }
    try {
      decode_frame(bytes);
      FrameReader reader;
      reader.feed(bytes);
      while (reader.next()) {
      }
    } catch (const DecodeError&) {
      ++rejected;
    }
  }
  return rejected;
}

// 8. Pusher -> collector -> store -> query integrity, plus decoder fuzzing.
Outcome transport_integrity() {
  TempDir dir;
  CollectorDaemon collector(
      parse_daemon_config("role collector\nlisten 127.0.0.1:0\nstore_dir " + (dir.path() / "store").string() + "\n"));
  collector.start();
  PusherDaemon pusher(parse_daemon_config("role pusher\nconnect 127.0.0.1:" + std::to_string(collector.port()) + "\n"));
  auto source = std::make_unique<RecordingSource>(1000, 100, 10 * kNsPerMs);
  auto* recorder = source.get();
  pusher.add_source(std::move(source));
  pusher.start();
  if (!wait_for([&] { return recorder->done(); }, 60'000ms)) return {false, "source did not finish"};
  pusher.stop();
  if (!wait_for([&] { return collector.readings_received() >= 100'000; }, 30'000ms))
    return {false, "collector received " + std::to_string(collector.readings_received()) + " readings"};
  collector.stop();

  std::size_t mismatched = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < recorder->topics().size(); ++i) {
    const auto& want = recorder->sent()[i];
    total += want.size();
    const auto got = collector.store().query(recorder->topics()[i], 0, UINT64_MAX);
    if (!got || *got != want) ++mismatched;
  }
  const std::size_t cases = 100'000;
  const std::size_t rejected = fuzz_decoder(cases);
  return {total == 100'000 && mismatched == 0 && pusher.publisher()->dropped() == 0,
          std::to_string(total) + " readings over 1000 topics, " + std::to_string(mismatched) +
              " topics differ; fuzz " + std::to_string(cases) + " cases, " + std::to_string(rejected) +
              " rejected, no crash"};
}

// 9. Overhead envelope.
Outcome overhead() {
  TempDir dir;
  const auto r = run_overhead_scenario(OverheadScenario{});
  write_overhead_csv(r, dir.path());
  const bool csv = std::filesystem::exists(dir.path() / "overhead_grid.csv");
  double cpu = r.baseline_cpu_percent;
  double rss = r.baseline_rss_mb;
  double lat = 0.0;
  for (const auto& c : r.cells) {
    cpu = std::max(cpu, c.cpu_percent);
    rss = std::max(rss, c.rss_mb);
    lat = std::max(lat, c.median_latency_us);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu cells, max CPU %.3f%%, max RSS %.1f MB, max median latency %.1f us%s",
                r.cells.size(), cpu, rss, lat, csv ? "" : ", CSV missing");
  return {r.cells.size() == 24 && cpu < 5.0 && rss < 64.0 && lat < 1000.0 && csv, buf};
}

// 10. On-demand outputs only travel in the response.
Outcome on_demand_contract() {
  TempDir dir;
  CollectorDaemon collector(parse_daemon_config(
      "role collector\nlisten 127.0.0.1:0\nstore_dir " + (dir.path() / "store").string() +
      "\nplugin identity {\n operator probe {\n  mode on-demand\n  template {\n   input:\n    <bottomup>load\n"
      "   output:\n    <bottomup>probe-out\n  }\n }\n}\n"));
  collector.start();
  Publisher pub("127.0.0.1", collector.port());
  auto publish_round = [&](Timestamp t) {
    for (int n = 0; n < 4; ++n) {
      const SensorReading r{static_cast<std::int64_t>(t + n), t * kNsPerSec};
      pub.publish(Topic("/n" + std::to_string(n) + "/load"), std::span<const SensorReading>(&r, 1));
    }
  };
  publish_round(1);
  pub.flush(5000ms);
  if (!wait_for([&] { return collector.pending_plugins().empty(); }, 10'000ms)) return {false, "plugin never loaded"};
  collector.agent().operators().start("identity", "probe");

  RestApi api(collector.agent());
  RestServer server(api, "127.0.0.1", 0);
  server.start();
  httplib::Client client("127.0.0.1", server.port());
  std::size_t responses_with_output = 0;
  for (int i = 0; i < 100; ++i) {
    publish_round(2 + i);
    auto res = client.Get("/compute/identity/probe/n" + std::to_string(i % 4));
    if (!res || res->status != 200) return {false, "invocation " + std::to_string(i) + " failed"};
    const auto body = nlohmann::json::parse(res->body);
    if (!body["outputs"].empty() &&
        body["outputs"][0]["topic"] == "/n" + std::to_string(i % 4) + "/probe-out")
      ++responses_with_output;
  }
  pub.flush(5000ms);
  wait_for([&] { return collector.readings_received() >= 4 * 101; }, 10'000ms);
  server.stop();
  collector.stop();

  std::size_t leaked = 0;
  for (const auto& t : collector.store().topics())
    if (t.name() == "probe-out") ++leaked;
  for (const auto& t : collector.agent().sensors())
    if (t.name() == "probe-out") ++leaked;
  const bool stored_inputs = collector.store().record_count(Topic("/n0/load")) > 0;
  return {responses_with_output == 100 && leaked == 0 && collector.agent().outputs_published() == 0 && stored_inputs,
          std::to_string(responses_with_output) + "/100 responses carried outputs; " + std::to_string(leaked) +
              " output topics found in store or caches"};
}

struct Criterion {
  int id;
  const char* name;
  std::chrono::seconds limit;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace oda

int main() {
  using namespace oda;
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> criteria = {
      {1, "block-system worked example", 1s, worked_example},
      {2, "resolution oracle equivalence", 60s, resolution_oracle},
      {3, "cache mode equivalence", 30s, cache_modes},
      {4, "deciles", 10s, deciles_oracle},
      {5, "regressor properties", 300s, regressor},
      {6, "clustering", 60s, clustering},
      {7, "pipeline semantics", 120s, pipeline},
      {8, "transport and store integrity", 120s, transport_integrity},
      {9, "overhead envelope", 600s, overhead},
      {10, "on-demand contract", 30s, on_demand_contract},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs < static_cast<double>(c.limit.count());
    const bool pass = outcome.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d %-32s %s  (%s; %.2f s, limit %lld s)\n", c.id, c.name, pass ? "PASS" : "FAIL",
                outcome.detail.c_str(), secs, static_cast<long long>(c.limit.count()));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
