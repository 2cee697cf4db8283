#pragma once

#include <vector>

#include <Eigen/Core>

namespace emg {

struct FilterConfig {
  double fs = 200.0;
  double band_lo = 10.0;
  double band_hi = 95.0;
  int bp_order = 4;
  double notch_f0 = 50.0;
  double notch_q = 30.0;
};

/// Throws emg::ConfigError describing the first violated constraint.
void validate(const FilterConfig& cfg);

/// One second-order section, a0 normalized to 1:
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
/// First-order sections set b2 = a2 = 0.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;

  /// Magnitude of the frequency response at `f` Hz.
  double gain_at(double f, double fs) const;
};

/// Cascade of biquads run in transposed direct form II, zero initial state.
class SosFilter {
public:
  SosFilter() = default;
  explicit SosFilter(std::vector<Biquad> sections) : sections_(std::move(sections)) {}

  const std::vector<Biquad>& sections() const { return sections_; }
  SosFilter then(const SosFilter& next) const;

  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double gain_at(double f, double fs) const;

private:
  std::vector<Biquad> sections_;
};

/// Bilinear-transform Butterworth designs (cutoff prewarped).
SosFilter butterworth_lowpass(int order, double fc, double fs);
SosFilter butterworth_highpass(int order, double fc, double fs);
/// Second-order notch at f0 with quality factor q; unit gain at DC.
SosFilter notch_filter(double f0, double q, double fs);

/// Highpass at band_lo cascaded with lowpass at band_hi, each of order bp_order/2.
SosFilter design_bandpass(const FilterConfig& cfg);
SosFilter design_notch(const FilterConfig& cfg);

Eigen::VectorXd bandpass(const Eigen::Ref<const Eigen::VectorXd>& signal, const FilterConfig& cfg);
Eigen::VectorXd notch(const Eigen::Ref<const Eigen::VectorXd>& signal, const FilterConfig& cfg);

/// Per-channel bandpass then notch on a (samples x 8) block.
Eigen::MatrixXd preprocess(const Eigen::Ref<const Eigen::MatrixXd>& block, const FilterConfig& cfg);

/// Precomputed preprocess chain for repeated use on windows.
class Preprocessor {
public:
  explicit Preprocessor(const FilterConfig& cfg);
  Eigen::MatrixXd operator()(const Eigen::Ref<const Eigen::MatrixXd>& block) const;
  const FilterConfig& config() const { return cfg_; }

private:
  FilterConfig cfg_;
  SosFilter chain_;
};

} // namespace emg
