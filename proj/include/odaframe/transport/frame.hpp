// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odaframe/sensor/topic.hpp"

namespace oda {

// Frame layout, all integers big-endian:
//   "ODA1" | version u8 = 1 | topic_len u16 | topic | count u32 |
//   count x (timestamp u64 ns, value i64)
inline constexpr std::uint8_t kFrameVersion = 1;
inline constexpr std::size_t kFrameFixedBytes = 11;
inline constexpr std::size_t kFrameRecordBytes = 16;

struct Frame {
  Topic topic;
  std::vector<SensorReading> readings;

  friend bool operator==(const Frame&, const Frame&) = default;
};

constexpr std::size_t frame_size(std::size_t topic_len, std::size_t count) {
  return kFrameFixedBytes + topic_len + kFrameRecordBytes * count;
}

/// Throws Error(kEncodeError) for an empty batch, more than 2^32-1 readings
/// or a topic longer than 65535 bytes.
std::vector<std::uint8_t> encode_frame(const Topic& topic, std::span<const SensorReading> readings);
void encode_frame_into(std::vector<std::uint8_t>& out, const Topic& topic,
                       std::span<const SensorReading> readings);

/// Decodes exactly one frame spanning all of `bytes`. Throws DecodeError
/// carrying the offset of the offending byte.
Frame decode_frame(std::span<const std::uint8_t> bytes);

/// Total length of the frame starting at bytes[0], or nullopt while the
/// header is incomplete. Throws DecodeError for a malformed header.
std::optional<std::size_t> peek_frame_length(std::span<const std::uint8_t> bytes);

/// Splits a byte stream into frames.
class FrameReader {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Next complete frame; throws DecodeError on malformed data, after which
  /// the reader should be discarded.
  std::optional<Frame> next();
  /// Raw bytes of the next complete frame, without decoding the payload.
  std::optional<std::vector<std::uint8_t>> next_raw();
  std::size_t buffered() const noexcept { return buffer_.size() - start_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t start_ = 0;
};

// Connection handshake sent by the client before any frame:
//   "ODAH" | role u8 (0 publisher, 1 subscriber) | prefix_len u16 | prefix
enum class PeerRole : std::uint8_t { kPublisher = 0, kSubscriber = 1 };

struct Handshake {
  PeerRole role = PeerRole::kPublisher;
  std::string prefix;
};

std::vector<std::uint8_t> encode_handshake(const Handshake& handshake);
/// Handshake and its byte length, or nullopt while incomplete. Throws
/// DecodeError for malformed input.
std::optional<std::pair<Handshake, std::size_t>> decode_handshake(std::span<const std::uint8_t> bytes);

}  // namespace oda
