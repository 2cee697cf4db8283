#include "emg/transport.hpp"

#include <cerrno>
#include <cstring>
#include <string>
#include <thread>

#include <sys/socket.h>
#include <unistd.h>

#include "emg/error.hpp"

namespace emg {

std::uint8_t frame_checksum(std::span<const std::uint8_t> bytes) {
  unsigned sum = 0;
  for (auto b : bytes) sum += b;
  return static_cast<std::uint8_t>(-(sum & 0xFFu));
}

FrameBytes encode_frame(const EmgFrame& frame) {
  FrameBytes out{};
  out[0] = kMagic0;
  out[1] = kMagic1;
  out[2] = static_cast<std::uint8_t>(frame.seq >> 8);
  out[3] = static_cast<std::uint8_t>(frame.seq & 0xFF);
  for (int c = 0; c < kChannels; ++c) out[4 + c] = static_cast<std::uint8_t>(frame.ch[c]);
  out[12] = frame_checksum(std::span(out).first(12));
  return out;
}

DecodeResult decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return {DecodeStatus::NeedMore, std::nullopt, 0};
  if (bytes[0] != kMagic0 || (bytes.size() >= 2 && bytes[1] != kMagic1))
    return {DecodeStatus::BadMagic, std::nullopt, 1};
  if (bytes.size() < kFrameSize) return {DecodeStatus::NeedMore, std::nullopt, 0};
  if (frame_checksum(bytes.first(12)) != bytes[12]) return {DecodeStatus::BadChecksum, std::nullopt, 1};
  EmgFrame f;
  f.seq = static_cast<std::uint16_t>((bytes[2] << 8) | bytes[3]);
  for (int c = 0; c < kChannels; ++c) f.ch[c] = static_cast<std::int8_t>(bytes[4 + c]);
  return {DecodeStatus::Ok, f, kFrameSize};
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  if (head_ > 4096 && head_ * 2 > buf_.size()) {
    buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(head_));
    head_ = 0;
  }
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

std::optional<EmgFrame> FrameDecoder::next() {
  for (;;) {
    const auto r = decode_frame(std::span(buf_).subspan(head_));
    head_ += r.consumed;
    switch (r.status) {
    case DecodeStatus::Ok:
      return r.frame;
    case DecodeStatus::NeedMore:
      return std::nullopt;
    case DecodeStatus::BadMagic:
      ++skipped_;
      break;
    case DecodeStatus::BadChecksum:
      ++dropped_;
      break;
    }
  }
}

std::optional<SeqGap> SeqTracker::observe(std::uint16_t seq) {
  std::optional<SeqGap> gap;
  if (last_) {
    const auto expected = static_cast<std::uint16_t>(*last_ + 1);
    if (seq != expected) {
      gap = SeqGap{expected, seq, static_cast<std::uint16_t>(seq - expected)};
      gaps_.push_back(*gap);
    }
  }
  last_ = seq;
  return gap;
}

ReplaySource::ReplaySource(const EmgRecording& rec, double rate)
    : rec_(rec), rate_(rate), start_(std::chrono::steady_clock::now()) {
  if (!(rate >= 0)) throw ConfigError("replay rate must be >= 0");
  validate(rec);
}

std::optional<EmgFrame> ReplaySource::next() {
  if (pos_ >= rec_.size()) return std::nullopt;
  if (rate_ > 0) {
    const std::chrono::duration<double> due(static_cast<double>(pos_) / (rec_.fs * rate_));
    std::this_thread::sleep_until(start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(due));
  }
  EmgFrame f{static_cast<std::uint16_t>(pos_ & 0xFFFF), rec_.samples[pos_].ch};
  ++pos_;
  return f;
}

LoopbackLink::LoopbackLink() {
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds_) != 0)
    throw Error(std::string("socketpair failed: ") + std::strerror(errno));
}

LoopbackLink::~LoopbackLink() {
  for (int fd : fds_)
    if (fd >= 0) ::close(fd);
}

void LoopbackLink::write_all(std::span<const std::uint8_t> bytes) {
  while (!bytes.empty()) {
    const ssize_t n = ::send(fds_[0], bytes.data(), bytes.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("link write failed: ") + std::strerror(errno));
    }
    bytes = bytes.subspan(static_cast<std::size_t>(n));
  }
}

std::size_t LoopbackLink::read_some(std::span<std::uint8_t> out) {
  for (;;) {
    const ssize_t n = ::recv(fds_[1], out.data(), out.size(), 0);
    if (n >= 0) return static_cast<std::size_t>(n);
    if (errno != EINTR) throw Error(std::string("link read failed: ") + std::strerror(errno));
  }
}

void LoopbackLink::close_writer() {
  if (fds_[0] >= 0) {
    ::shutdown(fds_[0], SHUT_WR);
    ::close(fds_[0]);
    fds_[0] = -1;
  }
}

void LoopbackLink::close_reader() {
  if (fds_[1] >= 0) ::shutdown(fds_[1], SHUT_RDWR);
}

StreamReport stream_recognize(const EmgRecording& rec, const RecognizerSetup& setup, double rate, LinkKind link) {
  StreamRecognizer recognizer(setup, rec.fs);
  StreamReport report;
  FrameDecoder decoder;
  SeqTracker seq;

  auto consume = [&](std::span<const std::uint8_t> bytes) {
    decoder.feed(bytes);
    while (auto f = decoder.next()) {
      ++report.frames;
      seq.observe(f->seq);
      if (auto ev = recognizer.push(f->ch)) report.events.push_back(std::move(*ev));
    }
  };

  // Frames travel in small chunks so the decoder sees realistic partial reads.
  constexpr std::size_t kFramesPerChunk = 16;
  auto produce = [&](auto&& send) {
    ReplaySource source(rec, rate);
    std::vector<std::uint8_t> chunk;
    while (auto f = source.next()) {
      const auto bytes = encode_frame(*f);
      chunk.insert(chunk.end(), bytes.begin(), bytes.end());
      if (chunk.size() >= kFramesPerChunk * kFrameSize || rate > 0) {
        send(chunk);
        chunk.clear();
      }
    }
    if (!chunk.empty()) send(chunk);
  };

  std::exception_ptr producer_error;
  if (link == LinkKind::InProcess) {
    BoundedQueue<std::vector<std::uint8_t>> queue(64);
    std::thread producer([&] {
      try {
        produce([&](std::vector<std::uint8_t>& c) { queue.push(c); });
      } catch (...) {
        producer_error = std::current_exception();
      }
      queue.close();
    });
    try {
      while (auto chunk = queue.pop()) consume(*chunk);
    } catch (...) {
      queue.close();
      producer.join();
      throw;
    }
    producer.join();
  } else {
    LoopbackLink sock;
    std::thread producer([&] {
      try {
        produce([&](std::vector<std::uint8_t>& c) { sock.write_all(c); });
      } catch (...) {
        producer_error = std::current_exception();
      }
      sock.close_writer();
    });
    std::array<std::uint8_t, 4096> buf{};
    try {
      while (std::size_t n = sock.read_some(buf)) consume(std::span(buf).first(n));
    } catch (...) {
      sock.close_reader();
      producer.join();
      throw;
    }
    producer.join();
  }
  if (producer_error) std::rethrow_exception(producer_error);

  report.dropped = decoder.dropped();
  report.gaps = seq.gaps();
  return report;
}

} // namespace emg
