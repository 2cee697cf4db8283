#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emg/dataset.hpp"
#include "emg/dsp.hpp"
#include "emg/mlp.hpp"
#include "emg/recognizer.hpp"
#include "emg/synth.hpp"

namespace emg {

struct GenSettings {
  std::vector<PlanSegment> segments = demo_plan(0).segments;
  int repeat = 1;
  double noise_floor = 1.0;
  double powerline_amp = 1.0;
};

/// Every tunable of the pipeline. Loaded from an INI-style file:
/// `key = value` lines grouped under `[section]` headers, `#` comments.
struct PipelineConfig {
  std::uint64_t seed = 1;
  int fs = kDefaultFs;
  FilterConfig filter;
  std::string wavelet = "db4";
  int levels = 3;
  RecognizerConfig recognizer;
  TrainConfig train;
  double train_hop = 0.5;
  double test_fraction = 0.25;
  std::optional<std::string> lexicon_path;
  GenSettings gen;

  WaveletSpec wavelet_spec() const { return wavelet_by_name(wavelet); }
  WindowingOptions windowing() const;
  SessionPlan plan() const;
};

PipelineConfig parse_config(std::string_view text);
PipelineConfig load_config_file(const std::string& path);

/// Cross-module checks, including window divisibility by 2^levels.
void validate(const PipelineConfig& cfg);

/// `Label:seconds` items separated by commas, e.g. `Rest:2, Fist:2`.
std::vector<PlanSegment> parse_plan(std::string_view text);

} // namespace emg
