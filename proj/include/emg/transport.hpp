#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "emg/recognizer.hpp"
#include "emg/recording.hpp"

namespace emg {

// Wire frame: A5 5A | seq (u16, big-endian) | 8 x int8 | checksum
inline constexpr std::size_t kFrameSize = 13;
inline constexpr std::uint8_t kMagic0 = 0xA5;
inline constexpr std::uint8_t kMagic1 = 0x5A;

struct EmgFrame {
  std::uint16_t seq = 0;
  ChannelValues ch{};

  friend bool operator==(const EmgFrame&, const EmgFrame&) = default;
};

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

/// Two's complement of the low 8 bits of the byte sum, so that all 13 bytes sum to 0 mod 256.
std::uint8_t frame_checksum(std::span<const std::uint8_t> bytes);
FrameBytes encode_frame(const EmgFrame& frame);

enum class DecodeStatus { Ok, NeedMore, BadMagic, BadChecksum };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::NeedMore;
  std::optional<EmgFrame> frame;
  std::size_t consumed = 0;  ///< bytes the caller should discard
};

/// Decodes one frame from the front of `bytes`. BadMagic and BadChecksum
/// consume one byte so the caller rescans from the next offset.
DecodeResult decode_frame(std::span<const std::uint8_t> bytes);

/// Buffers an arbitrary byte stream and yields valid frames in order.
class FrameDecoder {
public:
  void feed(std::span<const std::uint8_t> bytes);
  std::optional<EmgFrame> next();

  std::size_t dropped() const { return dropped_; }
  std::size_t skipped_bytes() const { return skipped_; }
  std::size_t buffered() const { return buf_.size() - head_; }

private:
  std::vector<std::uint8_t> buf_;
  std::size_t head_ = 0;
  std::size_t dropped_ = 0;
  std::size_t skipped_ = 0;
};

struct SeqGap {
  std::uint16_t expected = 0;
  std::uint16_t received = 0;
  std::uint32_t missing = 0;
};

/// Reports breaks in the modulo-2^16 sequence counter.
class SeqTracker {
public:
  std::optional<SeqGap> observe(std::uint16_t seq);
  const std::vector<SeqGap>& gaps() const { return gaps_; }

private:
  std::optional<std::uint16_t> last_;
  std::vector<SeqGap> gaps_;
};

/// Frames of a recording in order, seq starting at 0. With rate > 0 each
/// frame is released at its scheduled time fs*rate; rate 0 does not pace.
class ReplaySource {
public:
  ReplaySource(const EmgRecording& rec, double rate);
  std::optional<EmgFrame> next();

private:
  const EmgRecording& rec_;
  double rate_;
  std::size_t pos_ = 0;
  std::chrono::steady_clock::time_point start_;
};

/// Bounded FIFO between one producer and one consumer. push blocks while
/// full; pop returns nullopt once closed and drained.
template <typename T>
class BoundedQueue {
public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}

  void push(T value) {
    std::unique_lock lock(mu_);
    not_full_.wait(lock, [&] { return items_.size() < capacity_ || closed_; });
    if (closed_) return;
    items_.push_back(std::move(value));
    not_empty_.notify_one();
  }

  std::optional<T> pop() {
    std::unique_lock lock(mu_);
    not_empty_.wait(lock, [&] { return !items_.empty() || closed_; });
    if (items_.empty()) return std::nullopt;
    T v = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return v;
  }

  void close() {
    std::lock_guard lock(mu_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

private:
  std::size_t capacity_;
  std::mutex mu_;
  std::condition_variable not_full_, not_empty_;
  std::deque<T> items_;
  bool closed_ = false;
};

/// Connected AF_UNIX stream socket pair standing in for the radio link.
class LoopbackLink {
public:
  LoopbackLink();
  ~LoopbackLink();
  LoopbackLink(const LoopbackLink&) = delete;
  LoopbackLink& operator=(const LoopbackLink&) = delete;

  void write_all(std::span<const std::uint8_t> bytes);
  /// Blocks until at least one byte arrives; returns 0 at end of stream.
  std::size_t read_some(std::span<std::uint8_t> out);
  void close_writer();
  /// Unblocks a writer stuck on a full socket buffer.
  void close_reader();

private:
  int fds_[2] = {-1, -1};
};

enum class LinkKind { InProcess, Socket };

struct StreamReport {
  std::vector<RecognitionEvent> events;
  std::size_t frames = 0;
  std::size_t dropped = 0;
  std::vector<SeqGap> gaps;
};

/// Replays `rec` as encoded frames over the chosen link on a producer
/// thread and recognizes on the calling thread.
StreamReport stream_recognize(const EmgRecording& rec, const RecognizerSetup& setup, double rate,
                              LinkKind link = LinkKind::InProcess);

} // namespace emg
