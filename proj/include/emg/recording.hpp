#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace emg {

inline constexpr int kChannels = 8;
inline constexpr int kSampleMin = -128;
inline constexpr int kSampleMax = 127;
inline constexpr int kDefaultFs = 200;

enum class Gesture { FingersSpread, Fist, WaveIn, WaveOut, DoubleTap, Rest };

/// The five active gestures, in declaration order (Rest excluded).
inline constexpr std::array<Gesture, 5> kActiveGestures = {
    Gesture::FingersSpread, Gesture::Fist, Gesture::WaveIn, Gesture::WaveOut,
    Gesture::DoubleTap};

std::string_view to_string(Gesture g);
std::optional<Gesture> parse_gesture(std::string_view name);

using ChannelValues = std::array<std::int8_t, kChannels>;

struct EmgSample {
  std::int64_t index = 0;
  ChannelValues ch{};

  friend bool operator==(const EmgSample&, const EmgSample&) = default;
};

/// A raw 8-channel recording. `labels` is either empty (unlabeled) or holds
/// exactly one tag per sample.
struct EmgRecording {
  int fs = kDefaultFs;
  std::vector<EmgSample> samples;
  std::vector<Gesture> labels;

  bool labeled() const { return !labels.empty(); }
  std::size_t size() const { return samples.size(); }

  friend bool operator==(const EmgRecording&, const EmgRecording&) = default;
};

/// Throws emg::Error if fs, index continuity or label alignment is violated.
void validate(const EmgRecording& rec);

/// Parses the `#emgrec v1` text format. Errors are emg::ParseError with the
/// 1-based line number.
EmgRecording parse_recording(std::string_view text);
std::string write_recording(const EmgRecording& rec);

EmgRecording read_recording_file(const std::string& path);
void write_recording_file(const EmgRecording& rec, const std::string& path);

/// Samples [first, first+count) as a (count x 8) matrix, rows = time.
Eigen::MatrixXd to_block(const EmgRecording& rec, std::size_t first, std::size_t count);

} // namespace emg
