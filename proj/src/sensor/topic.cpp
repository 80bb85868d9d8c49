// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/sensor/topic.hpp"

#include "odaframe/common/error.hpp"

namespace oda {

Topic::Topic(std::string path) : path_(std::move(path)) {
  if (!is_valid(path_)) {
    throw Error(ErrorCode::kInvalidTopic, "invalid topic '" + path_ + "'");
  }
}

bool Topic::is_valid(std::string_view path) noexcept {
  if (path.size() < 2 || path.front() != '/' || path.back() == '/') {
    return false;
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i] == '/' && path[i - 1] == '/') return false;
  }
  return true;
}

std::string_view Topic::name() const noexcept {
  std::string_view v = path_;
  return v.substr(v.rfind('/') + 1);
}

std::string_view Topic::parent_path() const noexcept {
  std::string_view v = path_;
  return v.substr(0, v.rfind('/') + 1);
}

std::vector<std::string_view> Topic::segments() const {
  std::vector<std::string_view> out;
  std::string_view v = path_;
  std::size_t pos = 1;
  while (pos <= v.size()) {
    auto next = v.find('/', pos);
    if (next == std::string_view::npos) next = v.size();
    out.push_back(v.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

bool topic_has_prefix(std::string_view topic, std::string_view prefix) noexcept {
  if (prefix.empty() || prefix == "/") return true;
  if (topic.substr(0, prefix.size()) != prefix) return false;
  if (topic.size() == prefix.size() || prefix.back() == '/') return true;
  return topic[prefix.size()] == '/';
}

}  // namespace oda
