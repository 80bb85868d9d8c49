// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include <json.hpp>

#include "odaframe/common/error.hpp"
#include "odaframe/ops/job.hpp"

namespace oda {

void validate_job(const JobInfo& job) {
  if (job.job_id.empty()) throw Error(ErrorCode::kInvalidArgument, "job has no id");
  if (job.node_list.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "job " + job.job_id + " has no nodes");
  }
  if (job.end && *job.end <= job.start) {
    throw Error(ErrorCode::kInvalidArgument, "job " + job.job_id + " ends before it starts");
  }
}

void JobRegistry::add(JobInfo job) {
  validate_job(job);
  std::lock_guard lock(mutex_);
  jobs_.push_back(std::move(job));
}

void JobRegistry::upsert(JobInfo job) {
  validate_job(job);
  std::lock_guard lock(mutex_);
  for (auto& existing : jobs_) {
    if (existing.job_id == job.job_id) {
      existing = std::move(job);
      return;
    }
  }
  jobs_.push_back(std::move(job));
}

std::vector<JobInfo> JobRegistry::all() const {
  std::lock_guard lock(mutex_);
  return jobs_;
}

std::vector<JobInfo> JobRegistry::active_at(Timestamp now) const {
  std::lock_guard lock(mutex_);
  std::vector<JobInfo> out;
  for (const auto& job : jobs_) {
    if (job.active_at(now)) out.push_back(job);
  }
  return out;
}

JobInfo JobRegistry::parse_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  JobInfo job;
  job.job_id = j.at("job_id").get<std::string>();
  job.user_id = j.value("user_id", std::string{});
  job.node_list = j.at("nodes").get<std::vector<std::string>>();
  job.start = j.at("start").get<Timestamp>();
  if (j.contains("end") && !j.at("end").is_null()) job.end = j.at("end").get<Timestamp>();
  validate_job(job);
  return job;
}

std::string JobRegistry::to_json(const JobInfo& job) {
  nlohmann::json j{{"job_id", job.job_id},
                   {"user_id", job.user_id},
                   {"nodes", job.node_list},
                   {"start", job.start}};
  j["end"] = job.end ? nlohmann::json(*job.end) : nlohmann::json(nullptr);
  return j.dump();
}

std::size_t JobRegistry::load_json_lines(std::istream& in) {
  std::string line;
  std::size_t line_no = 0, count = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      upsert(parse_json(line));
      ++count;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, 1, e.what());
    } catch (const Error& e) {
      throw ParseError(line_no, 1, e.what());
    }
  }
  return count;
}

}  // namespace oda
