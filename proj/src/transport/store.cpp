// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/transport/store.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

constexpr std::size_t kRecord = 16;
constexpr const char* kIndexName = "index";

[[noreturn]] void io_fail(const std::string& what) {
  throw Error(ErrorCode::kIoError, what + ": " + std::strerror(errno));
}

void put_be(std::uint8_t* p, std::uint64_t v) {
  for (int i = 7; i >= 0; --i, v >>= 8) p[i] = static_cast<std::uint8_t>(v);
}

std::uint64_t get_be(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

void write_all(int fd, const std::uint8_t* data, std::size_t size, const std::string& what) {
  while (size > 0) {
    ssize_t n = ::write(fd, data, size);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail(what);
    }
    data += n;
    size -= static_cast<std::size_t>(n);
  }
}

void read_at(int fd, std::uint8_t* data, std::size_t size, off_t offset) {
  while (size > 0) {
    ssize_t n = ::pread(fd, data, size, offset);
    if (n < 0) {
      if (errno == EINTR) continue;
      io_fail("pread");
    }
    if (n == 0) throw Error(ErrorCode::kIoError, "unexpected end of segment file");
    data += n;
    size -= static_cast<std::size_t>(n);
    offset += n;
  }
}

}  // namespace

struct TimeSeriesStore::Segment {
  int fd = -1;
  std::uint64_t id = 0;
  std::mutex write_mutex;
  std::atomic<std::size_t> committed{0};
  Timestamp tail = 0;  // guarded by write_mutex

  ~Segment() {
    if (fd >= 0) ::close(fd);
  }

  Timestamp timestamp_at(std::size_t i) const {
    std::uint8_t buf[8];
    read_at(fd, buf, 8, static_cast<off_t>(i * kRecord));
    return get_be(buf);
  }

  /// First record index in [0, count) with timestamp >= t.
  std::size_t lower_bound(Timestamp t, std::size_t count) const {
    std::size_t lo = 0, hi = count;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (timestamp_at(mid) < t) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  }

  std::size_t upper_bound(Timestamp t, std::size_t from, std::size_t count) const {
    std::size_t lo = from, hi = count;
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (timestamp_at(mid) <= t) lo = mid + 1;
      else hi = mid;
    }
    return lo;
  }
};

TimeSeriesStore::TimeSeriesStore(std::filesystem::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + directory_.string() + ": " + ec.message());

  const auto index_path = directory_ / kIndexName;
  {
    std::ifstream in(index_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto space = line.find(' ');
      std::uint64_t id = 0;
      std::string topic = space == std::string::npos ? "" : line.substr(space + 1);
      std::istringstream fields(line.substr(0, space));
      if (!(fields >> id) || !Topic::is_valid(topic)) {
        throw Error(ErrorCode::kIoError, "corrupt store index line '" + line + "'");
      }
      auto seg = std::make_unique<Segment>();
      seg->id = id;
      const auto path = directory_ / (std::to_string(id) + ".dat");
      seg->fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
      if (seg->fd < 0) io_fail("open " + path.string());
      struct stat st {};
      if (::fstat(seg->fd, &st) != 0) io_fail("stat " + path.string());
      const auto whole = static_cast<std::size_t>(st.st_size) / kRecord;
      if (static_cast<std::size_t>(st.st_size) != whole * kRecord) {
        if (::ftruncate(seg->fd, static_cast<off_t>(whole * kRecord)) != 0) io_fail("truncate " + path.string());
      }
      seg->committed.store(whole);
      if (whole > 0) seg->tail = seg->timestamp_at(whole - 1);
      next_id_ = std::max(next_id_, id + 1);
      segments_.emplace(Topic(topic), std::move(seg));
    }
  }
  index_fd_ = ::open(index_path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (index_fd_ < 0) io_fail("open " + index_path.string());
}

TimeSeriesStore::~TimeSeriesStore() {
  if (index_fd_ >= 0) ::close(index_fd_);
}

TimeSeriesStore::Segment* TimeSeriesStore::find(const Topic& topic) const {
  std::shared_lock lock(mutex_);
  auto it = segments_.find(topic);
  return it == segments_.end() ? nullptr : it->second.get();
}

TimeSeriesStore::Segment& TimeSeriesStore::find_or_create(const Topic& topic) {
  if (auto* seg = find(topic)) return *seg;
  std::unique_lock lock(mutex_);
  auto it = segments_.find(topic);
  if (it != segments_.end()) return *it->second;

  auto seg = std::make_unique<Segment>();
  seg->id = next_id_;
  const auto path = directory_ / (std::to_string(seg->id) + ".dat");
  seg->fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_APPEND | O_TRUNC | O_CLOEXEC, 0644);
  if (seg->fd < 0) io_fail("open " + path.string());
  const std::string line = std::to_string(seg->id) + " " + topic.str() + "\n";
  write_all(index_fd_, reinterpret_cast<const std::uint8_t*>(line.data()), line.size(), "write index");
  ++next_id_;
  auto& ref = *seg;
  segments_.emplace(topic, std::move(seg));
  return ref;
}

TimeSeriesStore::AppendResult TimeSeriesStore::append(const Topic& topic,
                                                      std::span<const SensorReading> readings) {
  AppendResult result;
  if (readings.empty()) return result;
  std::vector<SensorReading> batch(readings.begin(), readings.end());
  std::stable_sort(batch.begin(), batch.end(),
                   [](const SensorReading& a, const SensorReading& b) { return a.timestamp < b.timestamp; });

  Segment& seg = find_or_create(topic);
  std::lock_guard lock(seg.write_mutex);
  const std::size_t count = seg.committed.load();
  std::vector<std::uint8_t> bytes;
  bytes.reserve(batch.size() * kRecord);
  for (const auto& r : batch) {
    if (count + result.appended > 0 && r.timestamp < seg.tail) {
      ++result.rejected;
      continue;
    }
    std::uint8_t rec[kRecord];
    put_be(rec, r.timestamp);
    put_be(rec + 8, static_cast<std::uint64_t>(r.value));
    bytes.insert(bytes.end(), rec, rec + kRecord);
    seg.tail = r.timestamp;
    ++result.appended;
  }
  if (!bytes.empty()) write_all(seg.fd, bytes.data(), bytes.size(), "append " + topic.str());
  seg.committed.store(count + result.appended, std::memory_order_release);
  rejected_.fetch_add(result.rejected);
  return result;
}

std::optional<std::vector<SensorReading>> TimeSeriesStore::query(const Topic& topic, Timestamp t0,
                                                                 Timestamp t1) const {
  if (t0 > t1) throw Error(ErrorCode::kInvalidRange, "store query has t0 > t1");
  const Segment* seg = find(topic);
  if (!seg) return std::nullopt;
  const std::size_t count = seg->committed.load(std::memory_order_acquire);
  const std::size_t first = seg->lower_bound(t0, count);
  const std::size_t last = seg->upper_bound(t1, first, count);
  std::vector<SensorReading> out;
  if (first >= last) return out;
  std::vector<std::uint8_t> bytes((last - first) * kRecord);
  read_at(seg->fd, bytes.data(), bytes.size(), static_cast<off_t>(first * kRecord));
  out.reserve(last - first);
  for (std::size_t i = 0; i < last - first; ++i) {
    const std::uint8_t* p = &bytes[i * kRecord];
    out.push_back({static_cast<std::int64_t>(get_be(p + 8)), get_be(p)});
  }
  return out;
}

std::optional<Timestamp> TimeSeriesStore::newest(const Topic& topic) const {
  const Segment* seg = find(topic);
  if (!seg) return std::nullopt;
  const std::size_t count = seg->committed.load(std::memory_order_acquire);
  if (count == 0) return std::nullopt;
  return seg->timestamp_at(count - 1);
}

std::size_t TimeSeriesStore::record_count(const Topic& topic) const {
  const Segment* seg = find(topic);
  return seg ? seg->committed.load() : 0;
}

std::vector<Topic> TimeSeriesStore::topics() const {
  std::shared_lock lock(mutex_);
  std::vector<Topic> out;
  out.reserve(segments_.size());
  for (const auto& [t, _] : segments_) out.push_back(t);
  return out;
}

void TimeSeriesStore::sync() {
  std::shared_lock lock(mutex_);
  for (const auto& [_, seg] : segments_) ::fdatasync(seg->fd);
  if (index_fd_ >= 0) ::fdatasync(index_fd_);
}

}  // namespace oda
