#include "doctest.h"

#include <atomic>
#include <random>
#include <thread>

#include "emg/error.hpp"
#include "emg/synth.hpp"
#include "emg/transport.hpp"
#include "fixtures.hpp"

using namespace emg;

namespace {

EmgFrame random_frame(std::mt19937& rng) {
  std::uniform_int_distribution<int> seq(0, 65535), val(-128, 127);
  EmgFrame f;
  f.seq = static_cast<std::uint16_t>(seq(rng));
  for (auto& c : f.ch) c = static_cast<std::int8_t>(val(rng));
  return f;
}

std::vector<std::uint8_t> concat(const std::vector<EmgFrame>& frames) {
  std::vector<std::uint8_t> out;
  for (const auto& f : frames) {
    const auto b = encode_frame(f);
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

std::vector<EmgFrame> drain(FrameDecoder& d) {
  std::vector<EmgFrame> out;
  while (auto f = d.next()) out.push_back(*f);
  return out;
}

} // namespace

TEST_CASE("zero frame layout") {
  const auto b = encode_frame(EmgFrame{});
  const FrameBytes expected{0xA5, 0x5A, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0x01};
  CHECK(b == expected);
  unsigned sum = 0;
  for (auto x : b) sum += x;
  CHECK(sum % 256 == 0);
}

TEST_CASE("big-endian sequence and signed payload") {
  EmgFrame f;
  f.seq = 0x1234;
  f.ch = {-1, 127, -128, 0, 1, 2, 3, 4};
  const auto b = encode_frame(f);
  CHECK(b[2] == 0x12);
  CHECK(b[3] == 0x34);
  CHECK(b[4] == 0xFF);
  CHECK(b[5] == 0x7F);
  CHECK(b[6] == 0x80);
}

TEST_CASE("property: decode inverts encode") {
  std::mt19937 rng(60);
  for (int i = 0; i < 2000; ++i) {
    const auto f = random_frame(rng);
    const auto b = encode_frame(f);
    const auto r = decode_frame(b);
    REQUIRE(r.status == DecodeStatus::Ok);
    CHECK(r.consumed == kFrameSize);
    CHECK(*r.frame == f);
  }
}

TEST_CASE("truncated and empty input ask for more bytes") {
  CHECK(decode_frame({}).status == DecodeStatus::NeedMore);
  const auto b = encode_frame(EmgFrame{});
  for (std::size_t n = 1; n < kFrameSize; ++n) {
    const auto r = decode_frame(std::span(b).first(n));
    CHECK(r.status == DecodeStatus::NeedMore);
    CHECK(r.consumed == 0);
  }
}

TEST_CASE("corrupt checksum drops the frame and the stream continues") {
  std::vector<EmgFrame> frames{{1, {1, 2, 3, 4, 5, 6, 7, 8}}, {2, {}}, {3, {-5, 0, 0, 0, 0, 0, 0, 9}}};
  auto bytes = concat(frames);
  bytes[kFrameSize + 12] ^= 0x40;
  CHECK(decode_frame(std::span(bytes).subspan(kFrameSize)).status == DecodeStatus::BadChecksum);
  FrameDecoder d;
  d.feed(bytes);
  const auto got = drain(d);
  REQUIRE(got.size() == 2);
  CHECK(got[0] == frames[0]);
  CHECK(got[1] == frames[2]);
  CHECK(d.dropped() == 1);
}

TEST_CASE("one garbage byte before a frame is skipped") {
  const EmgFrame f{77, {9, 8, 7, 6, 5, 4, 3, 2}};
  auto bytes = concat({f});
  bytes.insert(bytes.begin(), 0x13);
  FrameDecoder d;
  d.feed(bytes);
  const auto got = drain(d);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == f);
  CHECK(d.skipped_bytes() == 1);
  CHECK(d.buffered() == 0);
}

TEST_CASE("byte-at-a-time feeding matches bulk feeding") {
  std::mt19937 rng(61);
  std::vector<EmgFrame> frames;
  for (int i = 0; i < 100; ++i) frames.push_back(random_frame(rng));
  const auto bytes = concat(frames);
  FrameDecoder d;
  std::vector<EmgFrame> got;
  for (auto b : bytes) {
    d.feed(std::span(&b, 1));
    while (auto f = d.next()) got.push_back(*f);
  }
  CHECK(got == frames);
}

TEST_CASE("property: resynchronization never emits a frame absent from the input") {
  std::mt19937 rng(62);
  std::uniform_int_distribution<int> byte(0, 255), coin(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::uint8_t> bytes;
    for (int i = 0; i < 40; ++i) {
      if (coin(rng) == 0) {
        const int junk = 1 + coin(rng) * 3;
        for (int j = 0; j < junk; ++j) bytes.push_back(static_cast<std::uint8_t>(byte(rng)));
        if (coin(rng) == 0) bytes.insert(bytes.end(), {kMagic0, kMagic1});
      } else {
        auto b = encode_frame(random_frame(rng));
        if (coin(rng) == 0) b[4 + coin(rng)] ^= static_cast<std::uint8_t>(1 + byte(rng) % 255);
        bytes.insert(bytes.end(), b.begin(), b.end());
      }
    }
    FrameDecoder d;
    d.feed(bytes);
    for (const auto& f : drain(d)) {
      const auto enc = encode_frame(f);
      CHECK(std::search(bytes.begin(), bytes.end(), enc.begin(), enc.end()) != bytes.end());
      CHECK(frame_checksum(std::span(enc).first(12)) == enc[12]);
    }
  }
}

TEST_CASE("replay at rate 0 yields every sample in order") {
  SessionPlan p;
  p.segments = {{Gesture::Rest, 2}, {Gesture::Fist, 1}};
  const auto rec = gen_recording(p, default_templates());
  ReplaySource src(rec, 0);
  std::size_t n = 0;
  while (auto f = src.next()) {
    CHECK(f->seq == n);
    CHECK(f->ch == rec.samples[n].ch);
    ++n;
  }
  CHECK(n == rec.size());
}

TEST_CASE("sequence counter wraps after 65535") {
  EmgRecording rec;
  rec.samples.resize(65540);
  for (std::size_t i = 0; i < rec.samples.size(); ++i) rec.samples[i].index = static_cast<std::int64_t>(i);
  ReplaySource src(rec, 0);
  SeqTracker tracker;
  std::vector<std::uint16_t> seqs;
  while (auto f = src.next()) {
    tracker.observe(f->seq);
    seqs.push_back(f->seq);
  }
  CHECK(seqs[65535] == 65535);
  CHECK(seqs[65536] == 0);
  CHECK(seqs[65539] == 3);
  CHECK(tracker.gaps().empty());
}

TEST_CASE("paced replay follows the wall clock") {
  EmgRecording rec;
  rec.samples.resize(41);
  for (std::size_t i = 0; i < rec.samples.size(); ++i) rec.samples[i].index = static_cast<std::int64_t>(i);
  const auto t0 = std::chrono::steady_clock::now();
  ReplaySource src(rec, 2.0);  // 400 frames/s, 40 intervals = 0.1 s
  while (src.next()) {
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
  CHECK(dt.count() >= 0.099);
  CHECK(dt.count() < 1.0);
  CHECK_THROWS_AS(ReplaySource(rec, -1), ConfigError);
}

TEST_CASE("deleting one frame yields one gap") {
  std::vector<EmgFrame> frames;
  for (std::uint16_t s = 0; s < 50; ++s) frames.push_back({s, {}});
  frames.erase(frames.begin() + 20);
  FrameDecoder d;
  d.feed(concat(frames));
  SeqTracker tracker;
  for (const auto& f : drain(d)) tracker.observe(f.seq);
  REQUIRE(tracker.gaps().size() == 1);
  CHECK(tracker.gaps()[0].expected == 20);
  CHECK(tracker.gaps()[0].received == 21);
  CHECK(tracker.gaps()[0].missing == 1);
}

TEST_CASE("bounded queue delivers in order and blocks when full") {
  BoundedQueue<int> q(4);
  std::atomic<int> pushed{0};
  std::thread producer([&] {
    for (int i = 0; i < 1000; ++i) {
      q.push(i);
      ++pushed;
    }
    q.close();
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  CHECK(pushed.load() == 4);
  int expect = 0;
  while (auto v = q.pop()) CHECK(*v == expect++);
  producer.join();
  CHECK(expect == 1000);
}

TEST_CASE("loopback link carries bytes and signals end of stream") {
  LoopbackLink link;
  std::vector<std::uint8_t> sent(100000);
  for (std::size_t i = 0; i < sent.size(); ++i) sent[i] = static_cast<std::uint8_t>(i * 7);
  std::thread writer([&] {
    link.write_all(sent);
    link.close_writer();
  });
  std::vector<std::uint8_t> got;
  std::array<std::uint8_t, 1000> buf{};
  while (std::size_t n = link.read_some(buf)) got.insert(got.end(), buf.begin(), buf.begin() + n);
  writer.join();
  CHECK(got == sent);
}

TEST_CASE("streamed recognition equals batch recognition") {
  const auto& setup = fixture::trained_setup();
  for (std::uint64_t seed : {5, 6}) {
    const auto rec = gen_recording(demo_plan(seed), default_templates());
    const auto batch = recognize_stream(rec, setup);
    for (auto link : {LinkKind::InProcess, LinkKind::Socket}) {
      const auto report = stream_recognize(rec, setup, 0, link);
      CHECK(report.events == batch);
      CHECK(report.frames == rec.size());
      CHECK(report.dropped == 0);
      CHECK(report.gaps.empty());
    }
  }
}
