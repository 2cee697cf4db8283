#pragma once

#include "emg/dataset.hpp"
#include "emg/recognizer.hpp"
#include "emg/synth.hpp"

namespace fixture {

/// Trains once per process on a seeded synthetic corpus with default settings.
inline const emg::RecognizerSetup& trained_setup() {
  static const emg::RecognizerSetup setup = [] {
    const emg::EmgRecording rec = emg::gen_recording(emg::training_plan(6, 4.0, 2.0, 3), emg::default_templates());
    const emg::WaveletSpec spec = emg::daubechies4();
    const auto data = emg::extract_windows(rec, emg::FilterConfig{}, spec, emg::WindowingOptions{});
    emg::TrainConfig tc;
    tc.seed = 3;
    emg::RecognizerSetup s;
    s.model = emg::train(data, tc).model;
    return s;
  }();
  return setup;
}

} // namespace fixture
