#pragma once

#include <vector>

#include "emg/dsp.hpp"
#include "emg/mlp.hpp"
#include "emg/recording.hpp"
#include "emg/wavelet.hpp"

namespace emg {

struct WindowingOptions {
  double window_len = 1.0;  ///< seconds
  double hop = 0.5;         ///< seconds between window starts
  double activity_threshold = 4.0;
  int levels = 3;
};

/// Labeled feature vectors cut from a labeled recording. A window takes the
/// label of its center sample; windows whose labels are not uniform, Rest
/// windows and windows failing the activity gate are discarded.
std::vector<LabeledVector> extract_windows(const EmgRecording& rec, const FilterConfig& filter,
                                           const WaveletSpec& wavelet, const WindowingOptions& opts);

/// Keeps at most `per_class` samples of each label, in original order.
std::vector<LabeledVector> cap_per_class(const std::vector<LabeledVector>& data, std::size_t per_class);

} // namespace emg
