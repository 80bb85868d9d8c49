// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <random>

#include <gtest/gtest.h>

#include "odaframe/api/rest_api.hpp"
#include "odaframe/common/error.hpp"
#include "support/oracles.hpp"

// After Eigen (via the oracles): <resolv.h> defines a macro named _res.
#include <httplib.h>

namespace oda {
namespace {

using nlohmann::json;
constexpr Duration kSec = kNsPerSec;
constexpr Timestamp kNow = 30 * kSec;

std::string identity_config(const std::string& extra = "mode on-demand") {
  return "operator id {\n " + extra + "\n template {\n" + std::string(testing::kExampleTemplate) + "\n }\n}\n";
}

// An agent over the example system; sensor k holds value 100*k + t for
// t = 1..20 s.
class Api : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto topics = testing::example_system_topics();
    for (std::size_t k = 0; k < topics.size(); ++k) {
      std::vector<SensorReading> rs;
      for (Timestamp t = 1; t <= 20; ++t) rs.push_back({static_cast<std::int64_t>(100 * k + t), t * kSec});
      agent.ingest(Topic(topics[k]), rs);
    }
    agent.refresh_tree();
  }

  Agent agent;
  RestApi api{agent, [] { return kNow; }};
};

TEST_F(Api, SensorsMatchTree) {
  const auto r = api.sensors("/r03/c02/s01/");
  ASSERT_EQ(r.status, 200);
  std::vector<std::string> expected;
  for (const auto& t : agent.engine().navigator()->topics_with_prefix("/r03/c02/s01/")) expected.push_back(t.str());
  EXPECT_EQ(r.body["sensors"].get<std::vector<std::string>>(), expected);
  EXPECT_EQ(expected.size(), 5u);
  EXPECT_EQ(api.sensors("").body["sensors"].size(), testing::example_system_topics().size());
}

// The data handler must return exactly what a direct query returns.
TEST_F(Api, DataMatchesDirectQuery) {
  std::mt19937_64 rng(1);
  const auto topics = testing::example_system_topics();
  for (int i = 0; i < 200; ++i) {
    const Topic topic(topics[rng() % topics.size()]);
    if (i % 2 == 0) {
      const std::uint64_t ms = rng() % 25'000;
      const auto r = api.data({{"sensor", topic.str()}, {"rel", std::to_string(ms)}});
      ASSERT_EQ(r.status, 200) << r.body.dump();
      const auto direct = agent.engine().query(QueryRequest::relative(topic, ms * kNsPerMs));
      ASSERT_EQ(r.body["readings"], readings_json(direct.readings));
      ASSERT_EQ(r.body["partial"], direct.partial);
    } else {
      const Timestamp t1 = rng() % (25 * kSec);
      const Timestamp t0 = rng() % (t1 + 1);
      const auto r = api.data({{"sensor", topic.str()}, {"t0", std::to_string(t0)}, {"t1", std::to_string(t1)}});
      ASSERT_EQ(r.status, 200) << r.body.dump();
      const auto direct = agent.engine().query(QueryRequest::absolute(topic, t0, t1));
      ASSERT_EQ(r.body["readings"], readings_json(direct.readings));
      ASSERT_EQ(r.body["source"], "cache");
    }
  }
}

TEST_F(Api, DataErrors) {
  auto code = [](const ApiResponse& r) { return r.body["code"].get<std::string>(); };
  EXPECT_EQ(api.data({}).status, 400);
  EXPECT_EQ(api.data({{"sensor", "/r03/c01/power"}}).status, 400);
  EXPECT_EQ(api.data({{"sensor", "/r03/c01/power"}, {"rel", "1"}, {"t0", "1"}, {"t1", "2"}}).status, 400);
  EXPECT_EQ(api.data({{"sensor", "/r03/c01/power"}, {"t0", "1"}}).status, 400);
  EXPECT_EQ(api.data({{"sensor", "/r03/c01/power"}, {"rel", "-5"}}).status, 400);
  EXPECT_EQ(api.data({{"sensor", "/r03/c01/power"}, {"rel", "12x"}}).status, 400);
  const auto range = api.data({{"sensor", "/r03/c01/power"}, {"t0", "5"}, {"t1", "4"}});
  EXPECT_EQ(range.status, 400);
  EXPECT_EQ(code(range), "invalid_range");
  const auto unknown = api.data({{"sensor", "/nope"}, {"rel", "0"}});
  EXPECT_EQ(unknown.status, 404);
  EXPECT_EQ(code(unknown), "unknown_sensor");
  EXPECT_EQ(code(api.data({{"sensor", "no-slash"}, {"rel", "0"}})), "invalid_topic");
}

TEST_F(Api, LoadComputeAndReplace) {
  auto r = api.load_plugin("identity", identity_config());
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["status"], "loaded");
  EXPECT_EQ(r.body["operators"][0]["name"], "id");
  EXPECT_EQ(r.body["operators"][0]["blocks"], 4);
  EXPECT_EQ(api.compute("identity", "id", "r03/c02/s02").body["code"], "not_running");
  ASSERT_EQ(api.operator_action("identity", "id", "start", {}).status, 200);

  r = api.compute("identity", "id", "r03/c02/s02");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  const auto direct = agent.operators().on_demand("identity", "id", "/r03/c02/s02/", kNow);
  ASSERT_EQ(direct.size(), 1u);
  ASSERT_EQ(r.body["outputs"].size(), 1u);
  EXPECT_EQ(r.body["outputs"][0]["topic"], direct[0].topic.str());
  EXPECT_EQ(r.body["outputs"][0]["value"], direct[0].reading.value);
  EXPECT_EQ(r.body["outputs"][0]["timestamp"], direct[0].reading.timestamp);
  // The first input of every block is the chassis power, sensor index 1.
  EXPECT_EQ(direct[0].reading.value, 120);

  r = api.load_plugin("identity", identity_config());
  EXPECT_EQ(r.body["status"], "replaced");
  EXPECT_EQ(r.body["replaced"], true);
  EXPECT_EQ(agent.operators().list().size(), 1u);
}

TEST_F(Api, LoadErrorsReportPosition) {
  auto r = api.load_plugin("identity", "operator id {\n template {\n input:\n  <sideways>x\n output:\n  <bottomup>y\n }\n}\n");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["code"], "parse_error");
  EXPECT_EQ(r.body["line"], 4);
  EXPECT_GT(r.body["column"].get<int>(), 0);

  r = api.load_plugin("identity", "operator id {\n template {\n input:\n  <bottomup>nothing\n output:\n  <bottomup>y\n }\n}\n");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["code"], "instantiation_error");
  EXPECT_TRUE(r.body.contains("skipped"));

  r = api.load_plugin("no-such-plugin", identity_config());
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body["code"], "unknown_plugin");
  EXPECT_TRUE(agent.operators().list().empty());
}

TEST_F(Api, OperatorLifecycle) {
  ASSERT_EQ(api.load_plugin("identity", identity_config("interval_ms 1000")).status, 200);
  auto r = api.operator_action("identity", "id", "start", {});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["state"], "running");
  auto ops = api.operators().body["operators"];
  ASSERT_EQ(ops.size(), 1u);
  EXPECT_EQ(ops[0]["state"], "running");
  EXPECT_EQ(ops[0]["mode"], to_string(agent.operators().list()[0].mode));

  // Streaming operators refuse on-demand computation.
  r = api.compute("identity", "id", "r03/c02/s01");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(r.body["code"], "wrong_mode");

  r = api.operator_action("identity", "id", "stop", {});
  EXPECT_EQ(r.body["state"], "stopped");
  EXPECT_EQ(api.operators().body["operators"][0]["state"], "stopped");

  EXPECT_EQ(api.operator_action("identity", "nope", "start", {}).body["code"], "unknown_operator");
  EXPECT_EQ(api.operator_action("identity", "id", "explode", {}).body["code"], "unknown_action");
  EXPECT_EQ(api.operator_action("identity", "id", "explode", {}).status, 404);
}

TEST_F(Api, ComputeErrors) {
  ASSERT_EQ(api.load_plugin("identity", identity_config()).status, 200);
  ASSERT_EQ(api.operator_action("identity", "id", "start", {}).status, 200);
  EXPECT_EQ(api.compute("identity", "id", "r03/c02/s09").body["code"], "unknown_block");
  EXPECT_EQ(api.compute("identity", "other", "r03/c02/s01").body["code"], "unknown_operator");
}

TEST_F(Api, Jobs) {
  EXPECT_TRUE(api.jobs().body["jobs"].empty());
  auto r = api.add_jobs("{\"job_id\":\"j1\",\"nodes\":[\"/r03/c02/s01\"],\"start\":1}\n\n"
                        "{\"job_id\":\"j2\",\"nodes\":[\"/r03/c02/s02\"],\"start\":2,\"end\":9}\n");
  ASSERT_EQ(r.status, 200) << r.body.dump();
  EXPECT_EQ(r.body["accepted"], 2);
  EXPECT_EQ(api.jobs().body["jobs"].size(), 2u);

  // A bad line rejects the whole body.
  r = api.add_jobs("{\"job_id\":\"j3\",\"nodes\":[\"/a\"],\"start\":1}\n{broken\n");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["line"], 2);
  EXPECT_EQ(agent.jobs().all().size(), 2u);
}

TEST(ApiErrors, StatusMapping) {
  EXPECT_EQ(http_status(ErrorCode::kUnknownSensor), 404);
  EXPECT_EQ(http_status(ErrorCode::kInvalidArgument), 400);
  EXPECT_EQ(http_status(ErrorCode::kWrongMode), 409);
  EXPECT_EQ(http_status(ErrorCode::kNotReady), 503);
  const auto r = error_response(std::runtime_error("boom"));
  EXPECT_EQ(r.status, 500);
  EXPECT_EQ(r.body["code"], "internal");
}

// The HTTP shell returns the same bodies the handlers do.
TEST_F(Api, HttpServerMatchesHandlers) {
  RestServer server(api, "127.0.0.1", 0);
  server.start();
  ASSERT_NE(server.port(), 0);
  httplib::Client client("127.0.0.1", server.port());

  auto res = client.Get("/sensors?prefix=/r03/c01/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body), api.sensors("/r03/c01/").body);

  res = client.Get("/data?sensor=/r03/c01/power&t0=3000000000&t1=5000000000");
  ASSERT_TRUE(res);
  const auto body = json::parse(res->body);
  EXPECT_EQ(body["readings"].size(), 3u);
  EXPECT_EQ(body, api.data({{"sensor", "/r03/c01/power"}, {"t0", "3000000000"}, {"t1", "5000000000"}}).body);

  res = client.Post("/plugins/identity/load", identity_config(), "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client.Put("/operators/identity/id/start", "", "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client.Get("/compute/identity/id/r03/c02/s03");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["outputs"][0]["topic"], "/r03/c02/s03/healthy");

  res = client.Get("/operators");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["operators"][0]["state"], "running");

  res = client.Post("/jobs", "{\"job_id\":\"j\",\"nodes\":[\"/r03\"],\"start\":0}\n", "application/x-ndjson");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["accepted"], 1);
  res = client.Get("/jobs");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["jobs"][0]["job_id"], "j");

  res = client.Get("/data?sensor=/missing&rel=1");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = client.Get("/no/such/route");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(json::parse(res->body)["code"], "not_found");
  server.stop();
}

}  // namespace
}  // namespace oda
