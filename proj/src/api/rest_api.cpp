// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/api/rest_api.hpp"

#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "odaframe/blocks/block_engine.hpp"
#include "odaframe/common/clock.hpp"

namespace oda {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kInvalidTopic:
    case ErrorCode::kInvalidRange:
    case ErrorCode::kParseError:
    case ErrorCode::kInstantiationError:
    case ErrorCode::kConfigError:
    case ErrorCode::kEncodeError:
    case ErrorCode::kDecodeError:
      return 400;
    case ErrorCode::kUnknownSensor:
    case ErrorCode::kUnknownPlugin:
    case ErrorCode::kUnknownOperator:
    case ErrorCode::kUnknownBlock:
    case ErrorCode::kUnknownAction:
      return 404;
    case ErrorCode::kWrongMode:
    case ErrorCode::kNotRunning:
      return 409;
    case ErrorCode::kEmptyTree:
    case ErrorCode::kNotReady:
    case ErrorCode::kFeatureUnavailable:
      return 503;
    case ErrorCode::kIoError:
      return 500;
  }
  return 500;
}

ApiResponse error_response(const std::exception& e) {
  ApiResponse r;
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) {
    r.status = 500;
    r.body = {{"status", "error"}, {"code", "internal"}, {"message", e.what()}};
    return r;
  }
  r.status = http_status(err->code());
  r.body = {{"status", "error"},
            {"code", std::string(error_code_name(err->code()))},
            {"message", err->what()}};
  if (const auto* pe = dynamic_cast<const ParseError*>(err)) {
    r.body["line"] = pe->line();
    r.body["column"] = pe->column();
  }
  if (const auto* ie = dynamic_cast<const InstantiationError*>(err)) {
    json skipped = json::array();
    for (const auto& s : ie->skipped()) skipped.push_back({{"block", s.name}, {"reason", s.reason}});
    r.body["skipped"] = std::move(skipped);
  }
  return r;
}

json readings_json(const std::vector<SensorReading>& readings) {
  json out = json::array();
  for (const auto& r : readings) out.push_back({{"timestamp", r.timestamp}, {"value", r.value}});
  return out;
}

namespace {

template <typename F>
ApiResponse guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return error_response(e);
  }
}

std::uint64_t parse_u64(const std::map<std::string, std::string>& params, const std::string& key) {
  const auto& text = params.at(key);
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    if (!text.empty() && text[0] != '-') v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw Error(ErrorCode::kInvalidArgument, "'" + key + "' must be a non-negative integer");
  return v;
}

json outputs_json(const std::vector<OutputReading>& outputs) {
  json out = json::array();
  for (const auto& o : outputs)
    out.push_back({{"topic", o.topic.str()}, {"timestamp", o.reading.timestamp}, {"value", o.reading.value}});
  return out;
}

}  // namespace

RestApi::RestApi(Agent& agent, Clock clock) : agent_(agent), clock_(std::move(clock)) {
  if (!clock_) clock_ = wall_now;
}

ApiResponse RestApi::sensors(const std::string& prefix) const {
  return guarded([&] {
    agent_.refresh_tree();
    json topics = json::array();
    for (const auto& t : agent_.engine().navigator()->topics_with_prefix(prefix.empty() ? "/" : prefix))
      topics.push_back(t.str());
    return ApiResponse{200, {{"status", "ok"}, {"sensors", std::move(topics)}}};
  });
}

ApiResponse RestApi::data(const std::map<std::string, std::string>& params) const {
  return guarded([&] {
    const auto sensor = params.find("sensor");
    if (sensor == params.end()) throw Error(ErrorCode::kInvalidArgument, "missing 'sensor'");
    const bool rel = params.count("rel") > 0;
    const bool abs = params.count("t0") > 0 || params.count("t1") > 0;
    if (rel == abs) throw Error(ErrorCode::kInvalidArgument, "give exactly one of rel or t0/t1");
    if (abs && (!params.count("t0") || !params.count("t1")))
      throw Error(ErrorCode::kInvalidArgument, "absolute ranges need both t0 and t1");
    Topic topic(sensor->second);
    const QueryRequest req =
        rel ? QueryRequest::relative(topic, parse_u64(params, "rel") * kNsPerMs)
            : QueryRequest::absolute(topic, parse_u64(params, "t0"), parse_u64(params, "t1"));
    const auto result = agent_.engine().query(req);
    return ApiResponse{200,
                       {{"status", "ok"},
                        {"sensor", topic.str()},
                        {"partial", result.partial},
                        {"source", result.source == DataSource::kCache ? "cache" : "store"},
                        {"readings", readings_json(result.readings)}}};
  });
}

ApiResponse RestApi::operators() const {
  return guarded([&] {
    json ops = json::array();
    for (const auto& s : agent_.operators().list()) {
      ops.push_back({{"plugin", s.plugin},
                     {"name", s.name},
                     {"mode", std::string(to_string(s.mode))},
                     {"arrangement", std::string(to_string(s.arrangement))},
                     {"state", std::string(to_string(s.state))},
                     {"job_operator", s.job_operator},
                     {"blocks", s.blocks},
                     {"ticks", s.ticks},
                     {"skipped", s.skipped},
                     {"failures", s.failures}});
    }
    return ApiResponse{200, {{"status", "ok"}, {"operators", std::move(ops)}}};
  });
}

ApiResponse RestApi::operator_action(const std::string& plugin, const std::string& op,
                                     const std::string& action,
                                     const std::map<std::string, std::string>& params) {
  return guarded([&] {
    auto& om = agent_.operators();
    if (action == "start" || action == "stop") {
      if (action == "start") om.start(plugin, op);
      else om.stop(plugin, op);
      return ApiResponse{200,
                         {{"status", "ok"},
                          {"plugin", plugin},
                          {"operator", op},
                          {"state", action == "start" ? "running" : "stopped"}}};
    }
    const std::string result = om.custom_action(plugin, op, action, params, clock_());
    return ApiResponse{200, {{"status", result}, {"plugin", plugin}, {"operator", op}, {"action", action}}};
  });
}

ApiResponse RestApi::compute(const std::string& plugin, const std::string& op, const std::string& block) {
  return guarded([&] {
    agent_.refresh_tree();
    const auto outputs = agent_.operators().on_demand(plugin, op, block, clock_());
    return ApiResponse{200,
                       {{"status", "ok"},
                        {"plugin", plugin},
                        {"operator", op},
                        {"block", block},
                        {"outputs", outputs_json(outputs)}}};
  });
}

ApiResponse RestApi::load_plugin(const std::string& plugin, const std::string& config_text) {
  return guarded([&] {
    agent_.refresh_tree();
    const auto report = agent_.operators().load_plugin(plugin, config_text);
    json ops = json::array();
    for (const auto& [name, blocks] : report.operators) ops.push_back({{"name", name}, {"blocks", blocks}});
    json skipped = json::array();
    for (const auto& s : report.skipped) skipped.push_back({{"block", s.name}, {"reason", s.reason}});
    return ApiResponse{200,
                       {{"status", report.replaced ? "replaced" : "loaded"},
                        {"plugin", report.plugin},
                        {"replaced", report.replaced},
                        {"operators", std::move(ops)},
                        {"skipped", std::move(skipped)}}};
  });
}

ApiResponse RestApi::jobs() const {
  return guarded([&] {
    json jobs = json::array();
    for (const auto& j : agent_.jobs().all()) jobs.push_back(json::parse(JobRegistry::to_json(j)));
    return ApiResponse{200, {{"status", "ok"}, {"jobs", std::move(jobs)}}};
  });
}

ApiResponse RestApi::add_jobs(const std::string& body) {
  return guarded([&] {
    // Parse everything first so a bad line leaves the registry untouched.
    std::vector<JobInfo> parsed;
    std::istringstream in(body);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        parsed.push_back(JobRegistry::parse_json(line));
      } catch (const ParseError& e) {
        throw ParseError(line_no, e.column(), e.reason());
      } catch (const Error& e) {
        throw ParseError(line_no, 1, e.what());
      } catch (const json::exception& e) {
        throw ParseError(line_no, 1, e.what());
      }
    }
    for (auto& j : parsed) agent_.jobs().upsert(std::move(j));
    return ApiResponse{200, {{"status", "ok"}, {"accepted", parsed.size()}}};
  });
}

struct RestServer::Impl {
  httplib::Server server;
  std::thread thread;
};

RestServer::RestServer(RestApi& api, std::string host, std::uint16_t port)
    : impl_(std::make_unique<Impl>()), host_(std::move(host)), port_(port) {
  auto& s = impl_->server;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto params_of = [](const httplib::Request& req) {
    std::map<std::string, std::string> out;
    for (const auto& [k, v] : req.params) out[k] = v;
    return out;
  };

  s.Get("/sensors", [&api, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.sensors(req.has_param("prefix") ? req.get_param_value("prefix") : "/"));
  });
  s.Get("/data", [&api, reply, params_of](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.data(params_of(req)));
  });
  s.Get("/operators", [&api, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, api.operators());
  });
  s.Put(R"(/operators/([^/]+)/([^/]+)/([^/]+))",
        [&api, reply, params_of](const httplib::Request& req, httplib::Response& res) {
          reply(res, api.operator_action(req.matches[1], req.matches[2], req.matches[3], params_of(req)));
        });
  s.Get(R"(/compute/([^/]+)/([^/]+)/(.+))",
        [&api, reply](const httplib::Request& req, httplib::Response& res) {
          reply(res, api.compute(req.matches[1], req.matches[2], req.matches[3]));
        });
  s.Post(R"(/plugins/([^/]+)/load)", [&api, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.load_plugin(req.matches[1], req.body));
  });
  s.Get("/jobs", [&api, reply](const httplib::Request&, httplib::Response& res) { reply(res, api.jobs()); });
  s.Post("/jobs", [&api, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.add_jobs(req.body));
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const json body = {{"status", "error"}, {"code", "not_found"}, {"message", "no such route"}};
    res.set_content(body.dump(), "application/json");
  });
}

RestServer::~RestServer() { stop(); }

void RestServer::start() {
  auto& s = impl_->server;
  if (port_ == 0) {
    const int bound = s.bind_to_any_port(host_);
    if (bound < 0) throw Error(ErrorCode::kIoError, "REST: cannot bind " + host_);
    port_ = static_cast<std::uint16_t>(bound);
  } else if (!s.bind_to_port(host_, port_)) {
    throw Error(ErrorCode::kIoError, "REST: cannot bind " + host_ + ":" + std::to_string(port_));
  }
  impl_->thread = std::thread([&s] { s.listen_after_bind(); });
  s.wait_until_ready();
  spdlog::info("REST listening on {}:{}", host_, port_);
}

void RestServer::stop() {
  if (!impl_->thread.joinable()) return;
  impl_->server.stop();
  impl_->thread.join();
}

}  // namespace oda
