// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/transport/frame.hpp"

#include <cstring>
#include <limits>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

constexpr std::uint8_t kMagic[4] = {'O', 'D', 'A', '1'};
constexpr std::uint8_t kHandshakeMagic[4] = {'O', 'D', 'A', 'H'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | p[i];
  return v;
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

void encode_frame_into(std::vector<std::uint8_t>& out, const Topic& topic,
                       std::span<const SensorReading> readings) {
  if (readings.empty()) throw Error(ErrorCode::kEncodeError, "frame needs at least one reading");
  if (readings.size() > std::numeric_limits<std::uint32_t>::max())
    throw Error(ErrorCode::kEncodeError, "too many readings for one frame");
  const std::string& t = topic.str();
  if (t.size() > std::numeric_limits<std::uint16_t>::max())
    throw Error(ErrorCode::kEncodeError, "topic longer than 65535 bytes");

  out.reserve(out.size() + frame_size(t.size(), readings.size()));
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kFrameVersion);
  put_u16(out, static_cast<std::uint16_t>(t.size()));
  out.insert(out.end(), t.begin(), t.end());
  put_u32(out, static_cast<std::uint32_t>(readings.size()));
  for (const auto& r : readings) {
    put_u64(out, r.timestamp);
    put_u64(out, static_cast<std::uint64_t>(r.value));
  }
}

std::vector<std::uint8_t> encode_frame(const Topic& topic, std::span<const SensorReading> readings) {
  std::vector<std::uint8_t> out;
  encode_frame_into(out, topic, readings);
  return out;
}

std::optional<std::size_t> peek_frame_length(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < 4 && i < bytes.size(); ++i) {
    if (bytes[i] != kMagic[i]) throw DecodeError(i, "bad frame magic");
  }
  if (bytes.size() < 5) return std::nullopt;
  if (bytes[4] != kFrameVersion) throw DecodeError(4, "unsupported frame version " + std::to_string(bytes[4]));
  if (bytes.size() < 7) return std::nullopt;
  const std::size_t topic_len = get_u16(&bytes[5]);
  if (bytes.size() < 7 + topic_len + 4) return std::nullopt;
  const std::size_t count = get_u32(&bytes[7 + topic_len]);
  if (count == 0) throw DecodeError(7 + topic_len, "frame has no readings");
  return frame_size(topic_len, count);
}

Frame decode_frame(std::span<const std::uint8_t> bytes) {
  auto length = peek_frame_length(bytes);
  if (!length) throw DecodeError(bytes.size(), "truncated frame header");
  if (bytes.size() < *length) throw DecodeError(bytes.size(), "truncated frame payload");
  if (bytes.size() > *length) throw DecodeError(*length, "trailing bytes after frame");

  const std::size_t topic_len = get_u16(&bytes[5]);
  std::string topic(reinterpret_cast<const char*>(&bytes[7]), topic_len);
  if (!Topic::is_valid(topic)) throw DecodeError(7, "invalid topic '" + topic + "'");
  const std::size_t count = get_u32(&bytes[7 + topic_len]);

  Frame frame{Topic(std::move(topic)), {}};
  frame.readings.reserve(count);
  const std::uint8_t* p = &bytes[kFrameFixedBytes + topic_len];
  for (std::size_t i = 0; i < count; ++i, p += kFrameRecordBytes) {
    frame.readings.push_back({static_cast<std::int64_t>(get_u64(p + 8)), get_u64(p)});
  }
  return frame;
}

void FrameReader::feed(std::span<const std::uint8_t> bytes) {
  if (start_ > 0 && start_ >= buffer_.size() / 2) {
    buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(start_));
    start_ = 0;
  }
  buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<std::vector<std::uint8_t>> FrameReader::next_raw() {
  std::span<const std::uint8_t> pending(buffer_.data() + start_, buffer_.size() - start_);
  auto length = peek_frame_length(pending);
  if (!length || pending.size() < *length) return std::nullopt;
  std::vector<std::uint8_t> raw(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(*length));
  start_ += *length;
  return raw;
}

std::optional<Frame> FrameReader::next() {
  std::span<const std::uint8_t> pending(buffer_.data() + start_, buffer_.size() - start_);
  auto length = peek_frame_length(pending);
  if (!length || pending.size() < *length) return std::nullopt;
  Frame frame = decode_frame(pending.first(*length));
  start_ += *length;
  return frame;
}

std::vector<std::uint8_t> encode_handshake(const Handshake& handshake) {
  if (handshake.prefix.size() > std::numeric_limits<std::uint16_t>::max())
    throw Error(ErrorCode::kEncodeError, "prefix longer than 65535 bytes");
  std::vector<std::uint8_t> out(std::begin(kHandshakeMagic), std::end(kHandshakeMagic));
  out.push_back(static_cast<std::uint8_t>(handshake.role));
  put_u16(out, static_cast<std::uint16_t>(handshake.prefix.size()));
  out.insert(out.end(), handshake.prefix.begin(), handshake.prefix.end());
  return out;
}

std::optional<std::pair<Handshake, std::size_t>> decode_handshake(std::span<const std::uint8_t> bytes) {
  for (std::size_t i = 0; i < 4 && i < bytes.size(); ++i) {
    if (bytes[i] != kHandshakeMagic[i]) throw DecodeError(i, "bad handshake magic");
  }
  if (bytes.size() < 7) return std::nullopt;
  if (bytes[4] > 1) throw DecodeError(4, "unknown peer role");
  const std::size_t len = get_u16(&bytes[5]);
  if (bytes.size() < 7 + len) return std::nullopt;
  Handshake h;
  h.role = static_cast<PeerRole>(bytes[4]);
  h.prefix.assign(reinterpret_cast<const char*>(&bytes[7]), len);
  return std::make_pair(std::move(h), 7 + len);
}

}  // namespace oda
