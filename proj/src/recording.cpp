#include "emg/recording.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "emg/error.hpp"

namespace emg {

namespace {

constexpr std::array<std::string_view, 6> kGestureNames = {
    "FingersSpread", "Fist", "WaveIn", "WaveOut", "DoubleTap", "Rest"};

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

} // namespace

std::string_view to_string(Gesture g) {
  return kGestureNames.at(static_cast<std::size_t>(g));
}

std::optional<Gesture> parse_gesture(std::string_view name) {
  for (std::size_t i = 0; i < kGestureNames.size(); ++i)
    if (kGestureNames[i] == name) return static_cast<Gesture>(i);
  return std::nullopt;
}

void validate(const EmgRecording& rec) {
  if (rec.fs <= 0) throw Error("sampling rate must be positive, got " + std::to_string(rec.fs));
  for (std::size_t i = 1; i < rec.samples.size(); ++i) {
    if (rec.samples[i].index != rec.samples[i - 1].index + 1)
      throw Error("sample indices must increase by 1 (sample " + std::to_string(i) + ")");
  }
  if (rec.labeled() && rec.labels.size() != rec.samples.size())
    throw Error("label count " + std::to_string(rec.labels.size()) +
                " does not match sample count " + std::to_string(rec.samples.size()));
}

EmgRecording parse_recording(std::string_view text) {
  auto lines = split(text, '\n');
  // A terminating newline leaves one empty trailing field.
  if (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ParseError(1, "missing header");

  constexpr std::string_view kPrefix = "#emgrec v1 fs=";
  std::string_view header = lines[0];
  if (!header.starts_with(kPrefix)) throw ParseError(1, "expected header '#emgrec v1 fs=<int>'");
  auto fs = parse_int<int>(header.substr(kPrefix.size()));
  if (!fs || *fs <= 0) throw ParseError(1, "invalid sampling rate in header");

  EmgRecording rec;
  rec.fs = *fs;
  rec.samples.reserve(lines.size() - 1);
  std::optional<bool> has_labels;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t lineno = li + 1;
    auto fields = split(lines[li], ',');
    if (fields.size() != 1 + kChannels && fields.size() != 2 + kChannels)
      throw ParseError(lineno, "expected index, 8 channel values and optional label; got " +
                                   std::to_string(fields.size()) + " fields");
    const bool labeled_row = fields.size() == 2 + kChannels;
    if (!has_labels) has_labels = labeled_row;
    if (*has_labels != labeled_row)
      throw ParseError(lineno, "label column must be present on all rows or none");

    EmgSample s;
    auto idx = parse_int<std::int64_t>(fields[0]);
    if (!idx) throw ParseError(lineno, "invalid sample index '" + std::string(fields[0]) + "'");
    s.index = *idx;
    if (!rec.samples.empty() && s.index != rec.samples.back().index + 1)
      throw ParseError(lineno, "sample index " + std::to_string(s.index) + " does not follow " +
                                   std::to_string(rec.samples.back().index));
    for (int c = 0; c < kChannels; ++c) {
      auto v = parse_int<int>(fields[1 + c]);
      if (!v) throw ParseError(lineno, "invalid value '" + std::string(fields[1 + c]) + "'");
      if (*v < kSampleMin || *v > kSampleMax)
        throw ParseError(lineno, "value " + std::to_string(*v) + " outside [-128, 127]");
      s.ch[c] = static_cast<std::int8_t>(*v);
    }
    rec.samples.push_back(s);
    if (labeled_row) {
      auto g = parse_gesture(fields[1 + kChannels]);
      if (!g) throw ParseError(lineno, "unknown label '" + std::string(fields[1 + kChannels]) + "'");
      rec.labels.push_back(*g);
    }
  }
  return rec;
}

std::string write_recording(const EmgRecording& rec) {
  validate(rec);
  std::string out = "#emgrec v1 fs=" + std::to_string(rec.fs) + "\n";
  out.reserve(out.size() + rec.samples.size() * 48);
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const auto& s = rec.samples[i];
    out += std::to_string(s.index);
    for (auto v : s.ch) {
      out += ',';
      out += std::to_string(static_cast<int>(v));
    }
    if (rec.labeled()) {
      out += ',';
      out += to_string(rec.labels[i]);
    }
    out += '\n';
  }
  return out;
}

EmgRecording read_recording_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open recording '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_recording(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.detail(), path);
  }
}

void write_recording_file(const EmgRecording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write recording '" + path + "'");
  out << write_recording(rec);
  if (!out) throw Error("write failed for '" + path + "'");
}

Eigen::MatrixXd to_block(const EmgRecording& rec, std::size_t first, std::size_t count) {
  if (first + count > rec.samples.size()) throw Error("block range exceeds recording length");
  Eigen::MatrixXd block(static_cast<Eigen::Index>(count), kChannels);
  for (std::size_t i = 0; i < count; ++i)
    for (int c = 0; c < kChannels; ++c)
      block(static_cast<Eigen::Index>(i), c) = rec.samples[first + i].ch[c];
  return block;
}

} // namespace emg
