#include "emg/dataset.hpp"

#include <cmath>
#include <map>

#include "emg/error.hpp"
#include "emg/features.hpp"
#include "emg/recognizer.hpp"

namespace emg {

std::vector<LabeledVector> extract_windows(const EmgRecording& rec, const FilterConfig& filter,
                                           const WaveletSpec& wavelet, const WindowingOptions& opts) {
  validate(rec);
  if (!rec.labeled()) throw Error("recording has no labels; training needs labeled data");
  if (std::abs(filter.fs - rec.fs) > 0)
    throw ConfigError("recording sampled at " + std::to_string(rec.fs) + " Hz but the pipeline is configured for " +
                      std::to_string(filter.fs) + " Hz");
  const auto W = static_cast<std::size_t>(std::lround(opts.window_len * rec.fs));
  const auto H = static_cast<std::size_t>(std::lround(opts.hop * rec.fs));
  if (W == 0 || H == 0) throw ConfigError("window and hop must span at least one sample");
  check_decomposable(static_cast<Eigen::Index>(W), wavelet, opts.levels);

  const Preprocessor preprocess(filter);
  std::vector<LabeledVector> out;
  for (std::size_t start = 0; start + W <= rec.size(); start += H) {
    const Gesture center = rec.labels[start + W / 2];
    if (center == Gesture::Rest) continue;
    bool uniform = true;
    for (std::size_t i = start; i < start + W && uniform; ++i) uniform = rec.labels[i] == center;
    if (!uniform) continue;
    const Eigen::MatrixXd raw = to_block(rec, start, W);
    if (!activity_gate(raw, opts.activity_threshold)) continue;
    out.push_back({feature_vector(preprocess(raw), wavelet, opts.levels), center});
  }
  return out;
}

std::vector<LabeledVector> cap_per_class(const std::vector<LabeledVector>& data, std::size_t per_class) {
  std::map<Gesture, std::size_t> taken;
  std::vector<LabeledVector> out;
  for (const auto& s : data)
    if (taken[s.label]++ < per_class) out.push_back(s);
  return out;
}

} // namespace emg
