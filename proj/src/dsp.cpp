#include "emg/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "emg/error.hpp"
#include "emg/recording.hpp"

namespace emg {

namespace {

constexpr double kPi = std::numbers::pi;

void require_cutoff(double fc, double fs, const char* what) {
  if (!(fs > 0)) throw ConfigError("sampling rate must be positive");
  if (!(fc > 0 && fc < fs / 2))
    throw ConfigError(std::string(what) + " " + std::to_string(fc) + " Hz must lie in (0, fs/2 = " +
                      std::to_string(fs / 2) + ")");
}

// Q of the k-th conjugate pole pair of an order-n Butterworth prototype.
// Pole angles from the negative real axis are (2k+1)pi/2n for even n and
// (k+1)pi/n for odd n (odd orders also carry one real pole).
double butterworth_q(int k, int n) {
  const double theta = n % 2 == 0 ? kPi * (2.0 * k + 1.0) / (2.0 * n) : kPi * (k + 1.0) / n;
  return 1.0 / (2.0 * std::cos(theta));
}

} // namespace

void validate(const FilterConfig& cfg) {
  if (!(cfg.fs > 0)) throw ConfigError("fs must be positive");
  if (!(cfg.band_lo > 0 && cfg.band_lo < cfg.band_hi && cfg.band_hi < cfg.fs / 2))
    throw ConfigError("bandpass edges must satisfy 0 < band_lo < band_hi < fs/2");
  if (cfg.bp_order <= 0 || cfg.bp_order % 2 != 0)
    throw ConfigError("bandpass order must be a positive even integer, got " +
                      std::to_string(cfg.bp_order));
  if (!(cfg.notch_f0 > 0 && cfg.notch_f0 < cfg.fs / 2))
    throw ConfigError("notch frequency must lie in (0, fs/2)");
  if (!(cfg.notch_q > 0)) throw ConfigError("notch Q must be positive");
}

double Biquad::gain_at(double f, double fs) const {
  const std::complex<double> z1 = std::polar(1.0, -2.0 * kPi * f / fs);
  const std::complex<double> z2 = z1 * z1;
  return std::abs((b0 + b1 * z1 + b2 * z2) / (1.0 + a1 * z1 + a2 * z2));
}

SosFilter SosFilter::then(const SosFilter& next) const {
  std::vector<Biquad> s = sections_;
  s.insert(s.end(), next.sections_.begin(), next.sections_.end());
  return SosFilter(std::move(s));
}

Eigen::VectorXd SosFilter::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd y = x;
  for (const auto& s : sections_) {
    double z1 = 0, z2 = 0;
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      const double in = y[n];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[n] = out;
    }
  }
  return y;
}

double SosFilter::gain_at(double f, double fs) const {
  double g = 1.0;
  for (const auto& s : sections_) g *= s.gain_at(f, fs);
  return g;
}

SosFilter butterworth_lowpass(int order, double fc, double fs) {
  require_cutoff(fc, fs, "lowpass cutoff");
  if (order < 1) throw ConfigError("filter order must be >= 1");
  std::vector<Biquad> sections;
  const double w0 = 2.0 * kPi * fc / fs;
  const double cw = std::cos(w0);
  for (int k = 0; k < order / 2; ++k) {
    const double alpha = std::sin(w0) / (2.0 * butterworth_q(k, order));
    const double a0 = 1.0 + alpha;
    sections.push_back({(1 - cw) / 2 / a0, (1 - cw) / a0, (1 - cw) / 2 / a0, -2 * cw / a0,
                        (1 - alpha) / a0});
  }
  if (order % 2 == 1) {
    const double K = std::tan(w0 / 2);
    sections.push_back({K / (1 + K), K / (1 + K), 0, (K - 1) / (K + 1), 0});
  }
  return SosFilter(std::move(sections));
}

SosFilter butterworth_highpass(int order, double fc, double fs) {
  require_cutoff(fc, fs, "highpass cutoff");
  if (order < 1) throw ConfigError("filter order must be >= 1");
  std::vector<Biquad> sections;
  const double w0 = 2.0 * kPi * fc / fs;
  const double cw = std::cos(w0);
  for (int k = 0; k < order / 2; ++k) {
    const double alpha = std::sin(w0) / (2.0 * butterworth_q(k, order));
    const double a0 = 1.0 + alpha;
    sections.push_back({(1 + cw) / 2 / a0, -(1 + cw) / a0, (1 + cw) / 2 / a0, -2 * cw / a0,
                        (1 - alpha) / a0});
  }
  if (order % 2 == 1) {
    const double K = std::tan(w0 / 2);
    sections.push_back({1 / (1 + K), -1 / (1 + K), 0, (K - 1) / (K + 1), 0});
  }
  return SosFilter(std::move(sections));
}

SosFilter notch_filter(double f0, double q, double fs) {
  require_cutoff(f0, fs, "notch frequency");
  if (!(q > 0)) throw ConfigError("notch Q must be positive");
  const double w0 = 2.0 * kPi * f0 / fs;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  return SosFilter({{1 / a0, -2 * cw / a0, 1 / a0, -2 * cw / a0, (1 - alpha) / a0}});
}

SosFilter design_bandpass(const FilterConfig& cfg) {
  validate(cfg);
  const int half = cfg.bp_order / 2;
  return butterworth_highpass(half, cfg.band_lo, cfg.fs)
      .then(butterworth_lowpass(half, cfg.band_hi, cfg.fs));
}

SosFilter design_notch(const FilterConfig& cfg) {
  validate(cfg);
  return notch_filter(cfg.notch_f0, cfg.notch_q, cfg.fs);
}

Eigen::VectorXd bandpass(const Eigen::Ref<const Eigen::VectorXd>& signal, const FilterConfig& cfg) {
  return design_bandpass(cfg).apply(signal);
}

Eigen::VectorXd notch(const Eigen::Ref<const Eigen::VectorXd>& signal, const FilterConfig& cfg) {
  return design_notch(cfg).apply(signal);
}

Preprocessor::Preprocessor(const FilterConfig& cfg)
    : cfg_(cfg), chain_(design_bandpass(cfg).then(design_notch(cfg))) {}

Eigen::MatrixXd Preprocessor::operator()(const Eigen::Ref<const Eigen::MatrixXd>& block) const {
  if (block.cols() != kChannels)
    throw DimensionError("expected " + std::to_string(kChannels) + " channels, got " +
                         std::to_string(block.cols()));
  Eigen::MatrixXd out(block.rows(), block.cols());
  for (Eigen::Index c = 0; c < block.cols(); ++c) out.col(c) = chain_.apply(block.col(c));
  return out;
}

Eigen::MatrixXd preprocess(const Eigen::Ref<const Eigen::MatrixXd>& block, const FilterConfig& cfg) {
  return Preprocessor(cfg)(block);
}

} // namespace emg
