#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "emg/recording.hpp"

namespace emg {

struct GestureTemplate {
  Gesture gesture = Gesture::Rest;
  std::array<double, kChannels> amp_profile{};  ///< per-channel RMS, raw units
  double band_lo = 20.0;
  double band_hi = 90.0;
};

/// One template per active gesture, excitation band 20-90 Hz.
std::vector<GestureTemplate> default_templates();

struct PlanSegment {
  Gesture label = Gesture::Rest;
  double seconds = 0;
};

struct SessionPlan {
  std::vector<PlanSegment> segments;
  int fs = kDefaultFs;
  double noise_floor = 1.0;
  double powerline_amp = 1.0;
  std::uint64_t seed = 1;
};

void validate(const SessionPlan& plan);

/// Sample count of a segment; throws emg::ConfigError if seconds*fs is not integral.
std::size_t segment_samples(const PlanSegment& seg, int fs);

/// Labeled recording: per segment, each channel is amp_profile[c] times
/// unit-RMS band-limited Gaussian noise, plus white noise of RMS noise_floor,
/// plus powerline_amp * sin(2 pi 50 t). Clipped to [-128, 127] and rounded.
EmgRecording gen_recording(const SessionPlan& plan, const std::vector<GestureTemplate>& templates);

/// Rest, then each active gesture for 2 s separated by 2.5 s of rest.
SessionPlan demo_plan(std::uint64_t seed);

/// `reps` rounds of every active gesture (`gesture_s` each), separated by `rest_s` of rest.
SessionPlan training_plan(int reps, double gesture_s, double rest_s, std::uint64_t seed);

} // namespace emg
