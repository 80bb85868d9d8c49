// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "odaframe/common/error.hpp"
#include "odaframe/daemon/agent.hpp"
#include "odaframe/plugins/clustering.hpp"
#include "odaframe/plugins/deciles.hpp"
#include "odaframe/plugins/features.hpp"
#include "odaframe/plugins/gaussian_mixture.hpp"
#include "odaframe/plugins/perfmetrics.hpp"
#include "odaframe/plugins/persyst.hpp"
#include "odaframe/plugins/querytest.hpp"
#include "odaframe/plugins/random_forest.hpp"
#include "odaframe/plugins/regressor.hpp"
#include "odaframe/plugins/tester.hpp"
#include "support/oracles.hpp"

namespace oda {
namespace {

constexpr Duration kSec = kNsPerSec;

void put(Agent& agent, const std::string& topic, std::int64_t value, Timestamp t) {
  const SensorReading r{value, t};
  agent.ingest(Topic(topic), std::span<const SensorReading>(&r, 1));
}

std::vector<SensorReading> series(std::initializer_list<std::int64_t> values, Duration step = kSec) {
  std::vector<SensorReading> out;
  Timestamp t = step;
  for (auto v : values) {
    out.push_back({v, t});
    t += step;
  }
  return out;
}

// --- features ------------------------------------------------------------------

TEST(Features, WindowStatistics) {
  const auto w = series({1, 2, 3, 4});
  const auto s = window_stats(w);
  ASSERT_TRUE(s);
  EXPECT_DOUBLE_EQ(s->mean, 2.5);
  EXPECT_DOUBLE_EQ(s->stddev, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(s->min, 1);
  EXPECT_DOUBLE_EQ(s->max, 4);
  EXPECT_DOUBLE_EQ(s->last, 4);
  EXPECT_FALSE(window_stats({}));

  const auto v = feature_vector({w, series({7})});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->size(), 2 * kFeaturesPerInput);
  EXPECT_EQ((*v)[5], 7.0);
  EXPECT_EQ((*v)[6], 0.0);
  EXPECT_FALSE(feature_vector({w, {}}));
}

// --- random forest -------------------------------------------------------------

TEST(RandomForest, LearnsLinearFunction) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng);
    x.push_back({v, u(rng)});  // second feature is noise
    y.push_back(3 * v);
  }
  RandomForest forest({.trees = 32, .seed = 9});
  forest.train(x, y);
  ASSERT_TRUE(forest.trained());
  EXPECT_EQ(forest.dimensions(), 2u);
  for (double v = 1.0; v < 10.0; v += 0.37) {
    const std::vector<double> q = {v, 5.0};
    EXPECT_NEAR(forest.predict(q), 3 * v, 0.1 * 3 * v) << v;
  }
}

TEST(RandomForest, PredictionsStayInsideTrainingRange) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 300; ++i) {
    x.push_back({n(rng), n(rng), n(rng)});
    y.push_back(std::sin(x.back()[0]) * 50 + x.back()[1] * x.back()[2]);
  }
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  RandomForest forest({.trees = 16, .max_depth = 8, .feature_subset = 2, .seed = 1});
  forest.train(x, y);
  for (int i = 0; i < 2000; ++i) {
    const std::vector<double> q = {n(rng) * 10, n(rng) * 10, n(rng) * 10};
    const double p = forest.predict(q);
    EXPECT_GE(p, *lo - 1e-9);
    EXPECT_LE(p, *hi + 1e-9);
  }
}

TEST(RandomForest, DeterministicForSeed) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 200; ++i) {
    x.push_back({static_cast<double>(i % 17), static_cast<double>(i % 5)});
    y.push_back(i % 17 * 2.0 + i % 5);
  }
  RandomForest a({.trees = 8, .seed = 42}), b({.trees = 8, .seed = 42});
  a.train(x, y);
  b.train(x, y);
  for (const auto& q : x) EXPECT_EQ(a.predict(q), b.predict(q));
}

TEST(RandomForest, Errors) {
  RandomForest forest;
  const std::vector<double> q = {1.0};
  EXPECT_THROW(forest.predict(q), Error);
  EXPECT_THROW(forest.train({{1.0}}, {1.0}), Error);          // below min_samples
  EXPECT_THROW(forest.train({{1.0}, {2.0}}, {1.0}), Error);   // length mismatch
  EXPECT_THROW(forest.train({{1.0}, {2.0, 3.0}}, {1.0, 2.0}), Error);
}

// --- regressor -----------------------------------------------------------------

TEST(Regressor, ResponseAlignment) {
  EXPECT_TRUE(RegressorOperator::response_aligned(10 * kSec, 11 * kSec, kSec));
  EXPECT_TRUE(RegressorOperator::response_aligned(10 * kSec, 11 * kSec + kSec / 2, kSec));
  EXPECT_TRUE(RegressorOperator::response_aligned(10 * kSec, 10 * kSec + kSec / 2, kSec));
  EXPECT_FALSE(RegressorOperator::response_aligned(10 * kSec, 11 * kSec + kSec / 2 + 1, kSec));
  EXPECT_FALSE(RegressorOperator::response_aligned(10 * kSec, 10 * kSec, kSec));
  EXPECT_FALSE(RegressorOperator::response_aligned(10 * kSec, 13 * kSec, kSec));
}

TEST(Regressor, TrainsExactlyAtTrainingSetSize) {
  Agent agent;
  put(agent, "/n0/power", 100, 0);
  put(agent, "/n0/load", 0, 0);
  agent.refresh_tree();
  agent.operators().load_plugin("regressor", R"(operator pred {
    interval_ms 1000
    target power
    training_set_size 50
    min_train 10
    trees 8
    template {
        input:
            <bottomup>power
            <bottomup>load
        output:
            <bottomup>power-pred
    }
}
)");
  agent.operators().start_all();
  auto op = std::dynamic_pointer_cast<RegressorOperator>(agent.operators().find("regressor", "pred"));
  ASSERT_TRUE(op);
  std::vector<SensorReading> predictions;
  agent.set_output_sink([&](const Topic& t, std::span<const SensorReading> rs) {
    if (t.str() == "/n0/power-pred") predictions.insert(predictions.end(), rs.begin(), rs.end());
  });

  auto step = [&](Timestamp k) {
    const std::int64_t load = static_cast<std::int64_t>(k % 40 < 20 ? k % 40 : 40 - k % 40);
    put(agent, "/n0/load", load, k * kSec);
    put(agent, "/n0/power", 100 + 5 * load, k * kSec);
    agent.tick(k * kSec);
  };
  Timestamp k = 1;
  for (; op->training_pairs() < 49; ++k) {
    step(k);
    ASSERT_FALSE(op->model_ready());
    ASSERT_LT(k, 100u);
  }
  EXPECT_TRUE(predictions.empty());
  step(k++);
  EXPECT_TRUE(op->model_ready());
  EXPECT_EQ(op->training_pairs(), 0u);  // the training set is released after fitting
  EXPECT_EQ(predictions.size(), 1u);
  EXPECT_EQ(op->misaligned(), 0u);

  for (int i = 0; i < 100; ++i) step(k++);
  EXPECT_EQ(predictions.size(), 101u);
  const auto [lo, hi] = op->response_range();
  EXPECT_EQ(lo, 100.0);
  EXPECT_EQ(hi, 200.0);
  for (const auto& p : predictions) {
    EXPECT_GE(p.value, to_fixed_point(lo));
    EXPECT_LE(p.value, to_fixed_point(hi));
  }

  EXPECT_EQ(agent.operators().custom_action("regressor", "pred", "reset", {}, k * kSec), "reset");
  EXPECT_FALSE(op->model_ready());
  try {
    agent.operators().custom_action("regressor", "pred", "train", {}, k * kSec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotReady);
  }
  for (int i = 0; i < 12; ++i) step(k++);
  EXPECT_EQ(agent.operators().custom_action("regressor", "pred", "train", {}, k * kSec), "trained");
  EXPECT_TRUE(op->model_ready());
}

// --- perfmetrics ---------------------------------------------------------------

TEST(Perfmetrics, Ratio) {
  const std::vector<std::vector<SensorReading>> num = {series({1000, 1600})};
  const std::vector<std::vector<SensorReading>> den = {series({500, 700})};
  const auto r = perf_ratio(num, den);
  ASSERT_EQ(r.status, PerfOutcome::Status::kOk);
  EXPECT_DOUBLE_EQ(r.value, 3.0);

  const std::vector<std::vector<SensorReading>> two_num = {series({0, 100}), series({0, 50})};
  const std::vector<std::vector<SensorReading>> two_den = {series({0, 25}), series({10, 35})};
  EXPECT_DOUBLE_EQ(perf_ratio(two_num, two_den).value, 3.0);
}

TEST(Perfmetrics, EdgeCases) {
  const std::vector<std::vector<SensorReading>> one = {series({5})};
  const std::vector<std::vector<SensorReading>> ok = {series({0, 10})};
  const std::vector<std::vector<SensorReading>> flat = {series({7, 7})};
  const std::vector<std::vector<SensorReading>> wrapped = {series({100, 3})};
  EXPECT_EQ(perf_ratio(one, ok).status, PerfOutcome::Status::kInsufficient);
  EXPECT_EQ(perf_ratio(ok, flat).status, PerfOutcome::Status::kZeroDenominator);
  EXPECT_EQ(perf_ratio(wrapped, ok).status, PerfOutcome::Status::kReset);
  EXPECT_EQ(perf_ratio(ok, wrapped).status, PerfOutcome::Status::kReset);
  const std::vector<std::vector<SensorReading>> rate = {series({0, 10, 40}, kSec / 2)};
  EXPECT_DOUBLE_EQ(perf_rate(rate).value, 40.0);
  EXPECT_EQ(perf_rate(flat).value, 0.0);
}

// Adding any constant to a counter leaves the ratio unchanged.
TEST(PerfmetricsProperty, OffsetInvariance) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::int64_t> step(0, 1'000'000);
  std::uniform_int_distribution<std::int64_t> base(0, std::int64_t{1} << 50);
  for (int round = 0; round < 1000; ++round) {
    std::vector<SensorReading> c, i;
    std::int64_t cv = 0, iv = 0;
    for (Timestamp t = 1; t <= 5; ++t) {
      c.push_back({cv += step(rng), t * kSec});
      i.push_back({iv += step(rng) + 1, t * kSec});
    }
    const std::vector<std::vector<SensorReading>> num = {c}, den = {i};
    const auto plain = perf_ratio(num, den);
    const std::int64_t dc = base(rng), di = base(rng);
    for (auto& r : c) r.value += dc;
    for (auto& r : i) r.value += di;
    const std::vector<std::vector<SensorReading>> num2 = {c}, den2 = {i};
    const auto shifted = perf_ratio(num2, den2);
    ASSERT_EQ(plain.status, shifted.status);
    ASSERT_DOUBLE_EQ(plain.value, shifted.value);
    const double oracle = static_cast<double>(c.back().value - c.front().value) /
                          static_cast<double>(i.back().value - i.front().value);
    ASSERT_DOUBLE_EQ(plain.value, oracle);
  }
}

TEST(Perfmetrics, OperatorEmitsFixedPointAndCountsResets) {
  Agent agent;
  for (int cpu = 0; cpu < 2; ++cpu) {
    put(agent, "/n0/cpu" + std::to_string(cpu) + "/cpu-cycles", 0, 0);
    put(agent, "/n0/cpu" + std::to_string(cpu) + "/instructions", 0, 0);
  }
  agent.refresh_tree();
  agent.operators().load_plugin("perfmetrics", R"(operator cpi {
    interval_ms 1000
    kind ratio
    template {
        input:
            <bottomup>cpu-cycles
            <bottomup>instructions
        output:
            <bottomup>cpi
    }
}
)");
  agent.operators().start_all();
  // cpu0: CPI 1.5 throughout; cpu1: cycles counter resets at t=3.
  const std::int64_t c1[] = {0, 700, 1400, 5, 705};
  for (Timestamp t = 1; t <= 4; ++t) {
    put(agent, "/n0/cpu0/cpu-cycles", static_cast<std::int64_t>(t) * 1500, t * kSec);
    put(agent, "/n0/cpu0/instructions", static_cast<std::int64_t>(t) * 1000, t * kSec);
    put(agent, "/n0/cpu1/cpu-cycles", c1[t], t * kSec);
    put(agent, "/n0/cpu1/instructions", static_cast<std::int64_t>(t) * 300, t * kSec);
    agent.tick(t * kSec);
  }
  EXPECT_EQ(agent.cache(Topic("/n0/cpu0/cpi"))->latest()->value, 1500);
  const auto cpu1 = agent.cache(Topic("/n0/cpu1/cpi"))->snapshot();
  // t=1 and t=2 see 700/300, t=3 is a reset and emits nothing, t=4 is 700/300.
  ASSERT_EQ(cpu1.size(), 3u);
  for (const auto& r : cpu1) EXPECT_EQ(r.value, to_fixed_point(700.0 / 300.0));
  EXPECT_EQ(cpu1[2].timestamp, 4 * kSec);
  auto op = std::dynamic_pointer_cast<PerfmetricsOperator>(agent.operators().find("perfmetrics", "cpi"));
  EXPECT_EQ(op->resets(), 1u);
}

// --- deciles -------------------------------------------------------------------

TEST(Deciles, SmallCases) {
  const auto one = deciles({4.0});
  for (double d : one) EXPECT_EQ(d, 4.0);
  const auto two = deciles({10.0, 0.0});
  for (std::size_t k = 0; k < kDecileCount; ++k) EXPECT_DOUBLE_EQ(two[k], static_cast<double>(k));
  const auto eleven = deciles({10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0});
  for (std::size_t k = 0; k < kDecileCount; ++k) EXPECT_EQ(eleven[k], static_cast<double>(k));
  EXPECT_THROW(deciles({}), Error);
}

TEST(DecilesProperty, MatchesSortOracleAndIsMonotone) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> size(1, 300);
  std::normal_distribution<double> value(1.0, 5.0);
  for (int round = 0; round < 3000; ++round) {
    const std::size_t n = round % 100 == 0 ? 2048 : static_cast<std::size_t>(size(rng));
    std::vector<double> v(n);
    const bool ties = round % 3 == 0;
    for (auto& x : v) x = ties ? std::round(value(rng)) : value(rng);
    const auto got = deciles(v);
    const auto want = testing::sorted_deciles(v);
    for (std::size_t k = 0; k < kDecileCount; ++k) {
      ASSERT_NEAR(got[k], want[k], 1e-9) << "n=" << n << " k=" << k;
      if (k > 0) ASSERT_LE(got[k - 1], got[k]);
    }
    EXPECT_EQ(got[0], *std::min_element(v.begin(), v.end()));
    EXPECT_EQ(got[10], *std::max_element(v.begin(), v.end()));
  }
}

TEST(Persyst, JobDecilesFromCpuValues) {
  Agent agent;
  for (int n = 0; n < 2; ++n)
    for (int c = 0; c < 4; ++c) put(agent, "/r0/n" + std::to_string(n) + "/cpu" + std::to_string(c) + "/cpi", 0, 0);
  agent.refresh_tree();
  agent.operators().load_plugin("persyst", R"(operator deciles {
    interval_ms 5000
    template {
        input:
            <bottomup>cpi
        output:
            <bottomup-1>cpi
    }
}
)");
  agent.operators().start_all();
  agent.jobs().add({"J1", "u", {"/r0/n0", "/r0/n1"}, 0, std::nullopt});
  agent.jobs().add({"J2", "u", {"/r0/n1"}, 0, std::nullopt});

  std::map<std::string, std::vector<double>> window;
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::int64_t> cpi(500, 3000);
  for (Timestamp t = 1; t <= 10; ++t) {
    for (int n = 0; n < 2; ++n) {
      for (int c = 0; c < 4; ++c) {
        const auto v = cpi(rng);
        put(agent, "/r0/n" + std::to_string(n) + "/cpu" + std::to_string(c) + "/cpi", v, t * kSec);
        if (t > 5) {
          window["J1"].push_back(static_cast<double>(v));
          if (n == 1) window["J2"].push_back(static_cast<double>(v));
        }
      }
    }
    agent.tick(t * kSec);
  }
  for (const auto& [job, values] : window) {
    const auto want = testing::sorted_deciles(values);
    for (std::size_t k = 0; k < kDecileCount; ++k) {
      const auto cache = agent.cache(Topic("/jobs/" + job + "/cpi-d" + std::to_string(k)));
      ASSERT_TRUE(cache) << job << " d" << k;
      const auto latest = cache->latest();
      ASSERT_TRUE(latest);
      EXPECT_EQ(latest->timestamp, 10 * kSec);
      EXPECT_EQ(latest->value, std::llround(want[k])) << job << " d" << k;
    }
  }
}

// --- Gaussian mixture ------------------------------------------------------------

std::vector<Eigen::VectorXd> blobs(std::mt19937_64& rng, const std::vector<Eigen::Vector2d>& centres,
                                   int per_blob, double sigma, std::vector<int>* truth = nullptr) {
  std::normal_distribution<double> n(0.0, sigma);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t c = 0; c < centres.size(); ++c) {
    for (int i = 0; i < per_blob; ++i) {
      out.push_back(centres[c] + Eigen::Vector2d(n(rng), n(rng)));
      if (truth) truth->push_back(static_cast<int>(c));
    }
  }
  return out;
}

const std::vector<Eigen::Vector2d> kCentres = {{0, 0}, {1, 0}, {0, 1}};

TEST(GaussianMixture, RecoversUnitScaleClusters) {
  std::mt19937_64 rng(21);
  std::vector<int> truth;
  const auto pts = blobs(rng, kCentres, 100, 0.05, &truth);
  const auto model = fit_gmm(pts, {});
  ASSERT_EQ(model.size(), 3u);
  double total = 0.0;
  for (const auto& c : model.components()) {
    total += c.weight;
    EXPECT_NEAR(c.weight, 1.0 / 3.0, 0.02);
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (const auto& centre : kCentres) {
    double nearest = 1e9;
    for (const auto& c : model.components()) nearest = std::min(nearest, (c.mean - centre).norm());
    EXPECT_LT(nearest, 0.02);
  }

  std::vector<int> labels;
  for (const auto& p : pts) labels.push_back(model.assign(p, 0.001));
  EXPECT_EQ(testing::permutation_agreement(labels, truth), 1.0);
  EXPECT_EQ(model.assign(Eigen::Vector2d(0.5, 0.5), 0.001), kOutlierLabel);
  EXPECT_EQ(model.assign(Eigen::Vector2d(1.0 + 10 * 0.05, 0.0), 0.001), kOutlierLabel);
}

// The assignment rule against an independent density evaluation: the label is
// the component maximising weight * pdf, or the outlier label when every
// component density is below the threshold.
TEST(GaussianMixtureProperty, AssignMatchesDensityOracle) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-0.5, 1.5);
  for (int round = 0; round < 20; ++round) {
    const auto pts = blobs(rng, kCentres, 40, 0.03 + 0.01 * (round % 5));
    GmmParams params;
    params.max_components = 4 + round % 4;
    params.seed = static_cast<std::uint64_t>(round);
    const auto model = fit_gmm(pts, params);
    double total = 0.0;
    for (const auto& c : model.components()) total += c.weight;
    ASSERT_NEAR(total, 1.0, 1e-9);
    for (int q = 0; q < 500; ++q) {
      const Eigen::Vector2d x(u(rng), u(rng));
      int best = kOutlierLabel;
      double best_score = -1.0;
      bool dense = false;
      for (std::size_t k = 0; k < model.size(); ++k) {
        const auto& c = model.components()[k];
        const double pdf = testing::gaussian_pdf(c.mean, c.covariance, x);
        ASSERT_NEAR(model.density(k, x), pdf, 1e-9 * std::max(1.0, pdf));
        if (pdf >= 0.001) dense = true;
        if (c.weight * pdf > best_score) {
          best_score = c.weight * pdf;
          best = static_cast<int>(k);
        }
      }
      const int got = model.assign(x, 0.001);
      if (!dense) {
        ASSERT_EQ(got, kOutlierLabel);
      } else if (best_score > 1e-250) {
        ASSERT_EQ(got, best);
      }
    }
  }
}

TEST(GaussianMixture, Errors) {
  std::vector<Eigen::VectorXd> few = {Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)};
  EXPECT_THROW(fit_gmm(few, {}), Error);
  GmmParams zero;
  zero.max_components = 0;
  EXPECT_THROW(fit_gmm(few, zero), Error);
  MixtureModel empty;
  EXPECT_THROW(empty.assign(Eigen::Vector2d(0, 0), 0.001), Error);
}

TEST(Clustering, OperatorLabelsNodesAndHandlesActions) {
  Agent agent;
  std::mt19937_64 rng(5);
  // The outlier threshold is an absolute density, so it has to suit the data
  // scale: with unit spread the peak density is about 0.16.
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<int> truth;
  std::vector<std::string> nodes;
  const double cx[] = {0, 1000, 0}, cy[] = {0, 0, 1000};
  for (int g = 0; g < 3; ++g) {
    for (int i = 0; i < 30; ++i) {
      const std::string node = "/g" + std::to_string(g) + "/n" + std::to_string(i);
      nodes.push_back(node + "/");
      truth.push_back(g);
      put(agent, node + "/a", std::llround(cx[g] + noise(rng)), kSec);
      put(agent, node + "/b", std::llround(cy[g] + noise(rng)), kSec);
    }
  }
  agent.refresh_tree();
  agent.operators().load_plugin("clustering", R"(operator behaviour {
    interval_ms 1000
    window_ms 10000
    max_components 8
    threshold 0.00001
    covariance_prior_scale 0.001
    mean_precision_prior 0.001
    template {
        input:
            <bottomup>a
            <bottomup>b
        output:
            <bottomup>label
    }
}
)");
  auto& ops = agent.operators();
  try {
    ops.custom_action("clustering", "behaviour", "reassign", {}, kSec);
  } catch (const Error&) {
    FAIL() << "reassign should fit on demand";
  }
  auto op = std::dynamic_pointer_cast<ClusteringOperator>(ops.find("clustering", "behaviour"));
  ASSERT_TRUE(op->model());
  EXPECT_EQ(op->model()->size(), 3u);
  const auto labels = op->labels();
  ASSERT_EQ(labels.size(), nodes.size());
  std::vector<int> got;
  for (const auto& n : nodes) got.push_back(labels.at(n));
  EXPECT_EQ(testing::permutation_agreement(got, truth), 1.0);
  EXPECT_EQ(ops.custom_action("clustering", "behaviour", "refit", {}, kSec), "fitted 3 components");
  EXPECT_EQ(ops.custom_action("clustering", "behaviour", "reassign", {}, kSec), "reassigned 90 blocks");
  EXPECT_EQ(agent.cache(Topic("/g1/n3/label"))->latest()->value, labels.at("/g1/n3/"));

  EXPECT_THROW(ops.load_plugin("clustering", R"(operator bad {
    covariance_prior_scale 0
    template {
        input:
            <bottomup>a
        output:
            <bottomup>label
    }
}
)"),
               Error);
}

// --- tester and querytest -------------------------------------------------------

TEST(Tester, EmitsOneReadingPerSensorPerTick) {
  TesterSource tester("/test/", 1000, kSec);
  EXPECT_EQ(tester.topics().size(), 1000u);
  EXPECT_EQ(tester.topics()[7].str(), "/test/t0007");
  for (Timestamp t = 1; t <= 3; ++t) {
    std::size_t count = 0;
    tester.sample(t * kSec, [&](std::size_t i, SensorReading r) {
      EXPECT_LT(i, 1000u);
      EXPECT_EQ(r.value, static_cast<std::int64_t>(t));
      EXPECT_EQ(r.timestamp, t * kSec);
      ++count;
    });
    EXPECT_EQ(count, 1000u);
  }
  EXPECT_THROW(TesterSource("/x", 1, 0), Error);
}

// 1000 sensors with full 180 s caches, the shape of the overhead runs.
class QueryLoad : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    agent = new Agent();
    TesterSource tester("/test", 1000, kSec);
    for (Timestamp t = 1; t <= 200; ++t) {
      tester.sample(t * kSec, [&](std::size_t i, SensorReading r) {
        agent->ingest(tester.topics()[i], std::span<const SensorReading>(&r, 1));
      });
    }
    agent->refresh_tree();
  }
  static void TearDownTestSuite() {
    delete agent;
    agent = nullptr;
  }


  static std::unique_ptr<QuerytestOperator> make(std::size_t queries, Duration range, const char* mode) {
    const auto configs = parse_plugin_config(
        "operator qt {\n queries " + std::to_string(queries) + "\n range_ms " + std::to_string(range / kNsPerMs) +
            "\n query_mode " + mode + "\n prefix /test\n template {\n  operator_output:\n   latency-p50\n   readings\n }\n}\n",
        "querytest");
    return std::make_unique<QuerytestOperator>(configs.at(0));
  }

  static std::vector<OutputReading> run(QuerytestOperator& op, Timestamp now) {
    ComputeContext ctx(agent->engine(), op, now, false);
    op.compute_all(ctx);
    return ctx.take_outputs();
  }

  static inline Agent* agent = nullptr;
};

TEST_F(QueryLoad, RelativeAndAbsoluteReturnTheSameReadings) {
  auto rel = make(100, 60 * kSec, "relative");
  auto abs = make(100, 60 * kSec, "absolute");
  for (int tick = 0; tick < 10; ++tick) {
    const auto r = run(*rel, 200 * kSec);
    const auto a = run(*abs, 200 * kSec);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[1].topic.str(), "/oda/qt/readings");
    EXPECT_EQ(r[1].reading.value, 100 * 61);
    EXPECT_EQ(a[1].reading.value, r[1].reading.value);
  }
  EXPECT_EQ(rel->take_latencies().size(), 1000u);
  EXPECT_TRUE(rel->take_latencies().empty());
  EXPECT_EQ(rel->readings_returned(), abs->readings_returned());
}

TEST_F(QueryLoad, LatencyIsMonotoneInRangeForAbsoluteQueries) {
  // Interleaved sweep: every round visits each range once, in rotating order,
  // so slow drift of the machine affects all ranges alike.
  const std::vector<Duration> ranges = {0, 30 * kSec, 90 * kSec, 180 * kSec};
  std::vector<std::unique_ptr<QuerytestOperator>> ops;
  for (auto r : ranges) ops.push_back(make(1000, r, "absolute"));
  std::vector<std::vector<std::uint64_t>> samples(ranges.size());
  for (std::size_t round = 0; round < 40; ++round) {
    for (std::size_t j = 0; j < ranges.size(); ++j) {
      const std::size_t i = (round + j) % ranges.size();
      run(*ops[i], 200 * kSec);
      auto l = ops[i]->take_latencies();
      samples[i].insert(samples[i].end(), l.begin(), l.end());
    }
  }
  std::vector<std::uint64_t> medians;
  for (auto& s : samples) {
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
    medians.push_back(s[s.size() / 2]);
  }
  for (std::size_t i = 1; i < medians.size(); ++i)
    EXPECT_LE(medians[i - 1], medians[i]) << "range " << ranges[i] / kSec << " s";
  EXPECT_EQ(ops[3]->readings_returned(), 40u * 1000u * 181u);
  EXPECT_EQ(ops[0]->readings_returned(), 40u * 1000u);
}

}  // namespace
}  // namespace oda
