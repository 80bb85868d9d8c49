// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/query/query_engine.hpp"

#include "odaframe/common/error.hpp"

namespace oda {

QueryEngine& QueryEngine::instance() {
  static QueryEngine engine;
  return engine;
}

void QueryEngine::bind(DataSourceBinding binding) {
  if (!binding.cache_lookup) {
    throw Error(ErrorCode::kInvalidArgument, "query engine needs a cache lookup");
  }
  std::lock_guard lock(mutex_);
  if (binding_) throw Error(ErrorCode::kInvalidArgument, "query engine already bound");
  binding_ = std::make_shared<const DataSourceBinding>(std::move(binding));
}

bool QueryEngine::bound() const {
  std::lock_guard lock(mutex_);
  return binding_ != nullptr;
}

std::shared_ptr<const SensorTree> QueryEngine::navigator() const {
  std::lock_guard lock(mutex_);
  return tree_;
}

void QueryEngine::set_tree(std::shared_ptr<const SensorTree> tree) {
  std::lock_guard lock(mutex_);
  tree_ = tree ? std::move(tree) : std::make_shared<const SensorTree>();
}

QueryResult QueryEngine::from_store(const Topic& topic, Timestamp t0, Timestamp t1) const {
  auto readings = binding_->store_query(topic, t0, t1);
  if (!readings) throw Error(ErrorCode::kUnknownSensor, "unknown sensor " + topic.str());
  return {std::move(*readings), false, DataSource::kStore};
}

QueryResult QueryEngine::query(const QueryRequest& request) const {
  std::shared_ptr<const DataSourceBinding> binding;
  {
    std::lock_guard lock(mutex_);
    binding = binding_;
  }
  if (!binding) throw Error(ErrorCode::kNotReady, "query engine is not bound");

  const auto* relative = std::get_if<RelativeRange>(&request.range);
  const auto* absolute = std::get_if<AbsoluteRange>(&request.range);
  if (absolute && absolute->t0 > absolute->t1) {
    throw Error(ErrorCode::kInvalidRange, "absolute range has t0 > t1");
  }
  const bool has_store = static_cast<bool>(binding->store_query);

  const auto cache = binding->cache_lookup(request.topic);
  const auto latest = cache ? cache->latest() : std::nullopt;
  if (latest) {
    const Timestamp oldest = cache->oldest_timestamp().value_or(latest->timestamp);
    const Timestamp newest = latest->timestamp;
    const Timestamp start = relative
        ? (newest > relative->offset_ns ? newest - relative->offset_ns : 0)
        : absolute->t0;
    if (start >= oldest) {
      auto readings = relative ? cache->view_relative(relative->offset_ns)
                               : cache->view_absolute(absolute->t0, absolute->t1);
      return {std::move(readings), false, DataSource::kCache};
    }
    if (has_store) {
      const Timestamp end = relative ? newest : absolute->t1;
      if (auto readings = binding->store_query(request.topic, start, end)) {
        return {std::move(*readings), false, DataSource::kStore};
      }
    }
    auto readings = relative ? cache->view_relative(relative->offset_ns)
                             : cache->view_absolute(absolute->t0, absolute->t1);
    return {std::move(readings), true, DataSource::kCache};
  }

  if (has_store) {
    if (absolute) {
      if (auto readings = binding->store_query(request.topic, absolute->t0, absolute->t1)) {
        return {std::move(*readings), false, DataSource::kStore};
      }
    } else {
      const auto newest = binding->store_newest ? binding->store_newest(request.topic)
                                                : std::nullopt;
      if (newest) {
        const Timestamp t0 = *newest > relative->offset_ns ? *newest - relative->offset_ns : 0;
        return from_store(request.topic, t0, *newest);
      }
    }
  }
  if (cache) return {{}, false, DataSource::kCache};
  throw Error(ErrorCode::kUnknownSensor, "unknown sensor " + request.topic.str());
}

std::vector<JobInfo> QueryEngine::jobs(Timestamp now) const {
  std::shared_ptr<const DataSourceBinding> binding;
  {
    std::lock_guard lock(mutex_);
    binding = binding_;
  }
  if (!binding || !binding->job_lookup) {
    throw Error(ErrorCode::kFeatureUnavailable, "no job source configured");
  }
  std::vector<JobInfo> out;
  for (auto& job : binding->job_lookup()) {
    if (job.active_at(now)) out.push_back(std::move(job));
  }
  return out;
}

}  // namespace oda
