#include "doctest.h"

#include <random>

#include "emg/error.hpp"
#include "emg/recording.hpp"
#include "emg/synth.hpp"

using namespace emg;

TEST_CASE("parse a small recording") {
  const auto rec = parse_recording(
      "#emgrec v1 fs=200\n"
      "0,1,2,3,4,5,6,7,8\n"
      "1,-128,127,0,0,0,0,0,-1\n"
      "2,0,0,0,0,0,0,0,0\n");
  CHECK(rec.fs == 200);
  REQUIRE(rec.size() == 3);
  CHECK_FALSE(rec.labeled());
  CHECK(rec.samples[1].ch[0] == -128);
  CHECK(rec.samples[1].ch[1] == 127);
  CHECK(rec.samples[2].index == 2);
}

TEST_CASE("labels are parsed per sample") {
  const auto rec = parse_recording("#emgrec v1 fs=100\n5,0,0,0,0,0,0,0,0,Fist\n6,0,0,0,0,0,0,0,0,Rest\n");
  REQUIRE(rec.labels.size() == 2);
  CHECK(rec.labels[0] == Gesture::Fist);
  CHECK(rec.labels[1] == Gesture::Rest);
  CHECK(rec.samples[0].index == 5);
}

namespace {
std::size_t error_line(const std::string& text) {
  try {
    parse_recording(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}
} // namespace

TEST_CASE("parse errors name the offending line") {
  const std::string hdr = "#emgrec v1 fs=200\n";
  CHECK(error_line(hdr + "0,1,2,3,4,5,6,7,8\n1,1,2,3,4,5,6,7\n") == 3);          // 7 channels
  CHECK(error_line(hdr + "0,300,0,0,0,0,0,0,0\n") == 2);                          // range
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,0\n2,0,0,0,0,0,0,0,0\n") == 3);         // index gap
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,0\n0,0,0,0,0,0,0,0,0\n") == 3);         // repeated index
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,0,Fist\n1,0,0,0,0,0,0,0,0\n") == 3);   // label all-or-nothing
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,0,Jazz\n") == 2);
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,x\n") == 2);
  CHECK(error_line("#emgrec v2 fs=200\n") == 1);
  CHECK(error_line("#emgrec v1 fs=0\n") == 1);
  CHECK(error_line("") == 1);
  CHECK(error_line(hdr + "0,0,0,0,0,0,0,0,0,\n") == 2);  // trailing separator
}

TEST_CASE("range error message mentions the value") {
  try {
    parse_recording("#emgrec v1 fs=200\n0,300,0,0,0,0,0,0,0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("300") != std::string::npos);
  }
}

TEST_CASE("empty recording writes a header-only file") {
  EmgRecording rec;
  rec.fs = 250;
  CHECK(write_recording(rec) == "#emgrec v1 fs=250\n");
  CHECK(parse_recording(write_recording(rec)) == rec);
}

TEST_CASE("write/parse roundtrip on random recordings") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> val(kSampleMin, kSampleMax);
  std::uniform_int_distribution<int> lab(0, 5);
  for (int trial = 0; trial < 50; ++trial) {
    EmgRecording rec;
    rec.fs = 100 + trial;
    const int n = trial * 7;
    const bool labeled = trial % 2 == 0;
    const std::int64_t first = trial * 1000 - 5000;
    for (int i = 0; i < n; ++i) {
      EmgSample s;
      s.index = first + i;
      for (auto& c : s.ch) c = static_cast<std::int8_t>(val(rng));
      rec.samples.push_back(s);
      if (labeled) rec.labels.push_back(static_cast<Gesture>(lab(rng)));
    }
    const std::string text = write_recording(rec);
    CHECK(parse_recording(text) == rec);
    CHECK(write_recording(parse_recording(text)) == text);
  }
}

TEST_CASE("seeded synthetic recording roundtrips bit-exactly") {
  const auto rec = gen_recording(demo_plan(5), default_templates());
  const std::string bytes = write_recording(rec);
  const auto back = parse_recording(bytes);
  CHECK(back == rec);
  CHECK(write_recording(back) == bytes);
}

TEST_CASE("write rejects invalid recordings") {
  EmgRecording rec;
  rec.samples = {{0, {}}, {2, {}}};
  CHECK_THROWS_AS(write_recording(rec), Error);
  rec.samples[1].index = 1;
  rec.labels = {Gesture::Fist};
  CHECK_THROWS_AS(write_recording(rec), Error);
}

TEST_CASE("gesture names roundtrip") {
  for (int i = 0; i < 6; ++i) {
    const auto g = static_cast<Gesture>(i);
    CHECK(parse_gesture(to_string(g)) == g);
  }
  CHECK_FALSE(parse_gesture("fist").has_value());
}

TEST_CASE("to_block lays samples out as rows") {
  const auto rec = parse_recording("#emgrec v1 fs=200\n0,1,2,3,4,5,6,7,8\n1,9,10,11,12,13,14,15,16\n");
  const auto b = to_block(rec, 1, 1);
  CHECK(b.rows() == 1);
  CHECK(b.cols() == 8);
  CHECK(b(0, 7) == 16);
  CHECK_THROWS(to_block(rec, 1, 2));
}
