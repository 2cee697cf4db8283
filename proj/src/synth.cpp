#include "emg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "emg/dsp.hpp"
#include "emg/error.hpp"

namespace emg {

namespace {

constexpr double kPowerlineHz = 50.0;

// Excitation shaping filter: 4th-order Butterworth each side.
SosFilter excitation_filter(double lo, double hi, double fs) {
  return butterworth_highpass(4, lo, fs).then(butterworth_lowpass(4, hi, fs));
}

// RMS gain of the filter for unit white noise: sqrt of impulse-response energy.
double noise_gain(const SosFilter& f, double fs) {
  Eigen::VectorXd impulse = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(20 * fs));
  impulse[0] = 1.0;
  return f.apply(impulse).norm();
}

const GestureTemplate& find_template(const std::vector<GestureTemplate>& templates, Gesture g) {
  auto it = std::find_if(templates.begin(), templates.end(),
                         [g](const GestureTemplate& t) { return t.gesture == g; });
  if (it == templates.end()) throw ConfigError("no template for gesture " + std::string(to_string(g)));
  return *it;
}

} // namespace

std::vector<GestureTemplate> default_templates() {
  return {
      {Gesture::FingersSpread, {10, 35, 35, 10, 5, 5, 5, 5}},
      {Gesture::Fist, {36, 24, 15, 30, 39, 21, 33, 27}},
      {Gesture::WaveIn, {5, 5, 10, 35, 35, 10, 5, 5}},
      {Gesture::WaveOut, {5, 5, 5, 5, 10, 35, 35, 10}},
      {Gesture::DoubleTap, {35, 10, 5, 5, 5, 5, 10, 35}},
  };
}

std::size_t segment_samples(const PlanSegment& seg, int fs) {
  if (!(seg.seconds > 0)) throw ConfigError("segment durations must be positive");
  const double n = seg.seconds * fs;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9 * std::max(1.0, n))
    throw ConfigError("segment of " + std::to_string(seg.seconds) + " s is not a whole number of samples at " +
                      std::to_string(fs) + " Hz");
  return static_cast<std::size_t>(rounded);
}

void validate(const SessionPlan& plan) {
  if (plan.fs <= 0) throw ConfigError("plan sampling rate must be positive");
  if (!(plan.noise_floor >= 0)) throw ConfigError("noise_floor must be non-negative");
  if (!(plan.powerline_amp >= 0)) throw ConfigError("powerline_amp must be non-negative");
  if (plan.powerline_amp > 0 && !(kPowerlineHz < plan.fs / 2.0))
    throw ConfigError("powerline interference requires fs > 100 Hz");
  for (const auto& seg : plan.segments) segment_samples(seg, plan.fs);
}

EmgRecording gen_recording(const SessionPlan& plan, const std::vector<GestureTemplate>& templates) {
  validate(plan);
  const double fs = plan.fs;
  EmgRecording rec;
  rec.fs = plan.fs;

  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t warmup = static_cast<std::size_t>(fs);  // discarded filter transient
  std::int64_t n_global = 0;

  for (const auto& seg : plan.segments) {
    const std::size_t n = segment_samples(seg, plan.fs);
    Eigen::MatrixXd block = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), kChannels);

    if (seg.label != Gesture::Rest) {
      const auto& tpl = find_template(templates, seg.label);
      if (!(tpl.band_lo > 0 && tpl.band_lo < tpl.band_hi && tpl.band_hi < fs / 2))
        throw ConfigError("template band must lie inside (0, fs/2)");
      const SosFilter shaping = excitation_filter(tpl.band_lo, tpl.band_hi, fs);
      const double gain = noise_gain(shaping, fs);
      for (int c = 0; c < kChannels; ++c) {
        Eigen::VectorXd white(static_cast<Eigen::Index>(warmup + n));
        for (Eigen::Index i = 0; i < white.size(); ++i) white[i] = gauss(rng);
        const Eigen::VectorXd shaped = shaping.apply(white);
        block.col(c) = (tpl.amp_profile[c] / gain) * shaped.tail(static_cast<Eigen::Index>(n));
      }
    }
    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      const double hum =
          plan.powerline_amp * std::sin(2.0 * std::numbers::pi * kPowerlineHz * static_cast<double>(n_global + i) / fs);
      for (int c = 0; c < kChannels; ++c) block(i, c) += plan.noise_floor * gauss(rng) + hum;
    }

    for (Eigen::Index i = 0; i < block.rows(); ++i) {
      EmgSample s;
      s.index = n_global + i;
      for (int c = 0; c < kChannels; ++c) {
        const double v = std::clamp(block(i, c), double(kSampleMin), double(kSampleMax));
        s.ch[c] = static_cast<std::int8_t>(std::lround(v));
      }
      rec.samples.push_back(s);
      rec.labels.push_back(seg.label);
    }
    n_global += static_cast<std::int64_t>(n);
  }
  return rec;
}

SessionPlan demo_plan(std::uint64_t seed) {
  SessionPlan plan;
  plan.seed = seed;
  plan.segments.push_back({Gesture::Rest, 2.0});
  for (auto g : kActiveGestures) {
    plan.segments.push_back({g, 2.0});
    plan.segments.push_back({Gesture::Rest, 2.5});
  }
  return plan;
}

SessionPlan training_plan(int reps, double gesture_s, double rest_s, std::uint64_t seed) {
  SessionPlan plan;
  plan.seed = seed;
  plan.segments.push_back({Gesture::Rest, rest_s});
  for (int r = 0; r < reps; ++r)
    for (auto g : kActiveGestures) {
      plan.segments.push_back({g, gesture_s});
      plan.segments.push_back({Gesture::Rest, rest_s});
    }
  return plan;
}

} // namespace emg
