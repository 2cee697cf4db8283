#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "emg/error.hpp"
#include "emg/recording.hpp"
#include "emg/wavelet.hpp"

namespace emg {

inline constexpr int kMomentsPerBand = 4;

template <typename Scalar>
struct StatMoments {
  Scalar mean{};
  Scalar sigma{};
  Scalar skewness{};
  Scalar kurtosis{};
};

/// Below this sigma the sequence is treated as constant: skewness = kurtosis = 0.
inline constexpr double kDegenerateSigma = 1e-12;

/// Population mean, standard deviation, skewness and kurtosis of a
/// coefficient sequence (1/N normalization, no excess-kurtosis offset).
template <typename Derived>
StatMoments<typename Derived::Scalar> moments(const Eigen::DenseBase<Derived>& s) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = s.size();
  if (n < 1) throw Error("moments of an empty sequence");
  const auto a = s.derived().template cast<Scalar>().array();
  StatMoments<Scalar> m;
  m.mean = a.mean();
  const auto dev = (a - m.mean).eval();
  const auto dev2 = dev.square().eval();
  m.sigma = std::sqrt(dev2.mean());
  if (m.sigma < Scalar(kDegenerateSigma)) return m;
  const Scalar s2 = m.sigma * m.sigma;
  m.skewness = (dev2 * dev).mean() / (s2 * m.sigma);
  m.kurtosis = dev2.square().mean() / (s2 * s2);
  return m;
}

inline constexpr Eigen::Index feature_dimension(int levels) {
  return Eigen::Index{kChannels} * (levels + 1) * kMomentsPerBand;
}

/// Channel-major, then subband (D1..DL, AL), then (mean, sigma, skewness, kurtosis).
Eigen::VectorXd feature_vector(const Eigen::Ref<const Eigen::MatrixXd>& window, const WaveletSpec& spec,
                               int levels);

/// Per-dimension z-score. Dimensions whose training spread is zero pass through unchanged.
struct FeatureScaler {
  Eigen::VectorXd means;
  Eigen::VectorXd sigmas;

  static FeatureScaler identity(Eigen::Index dim);
  Eigen::Index dimension() const { return means.size(); }
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& v) const;

  friend bool operator==(const FeatureScaler& a, const FeatureScaler& b) {
    return a.means.size() == b.means.size() && a.sigmas.size() == b.sigmas.size() &&
           a.means == b.means && a.sigmas == b.sigmas;
  }
};

FeatureScaler fit_scaler(const std::vector<Eigen::VectorXd>& vectors);
inline Eigen::VectorXd apply_scaler(const FeatureScaler& scaler, const Eigen::Ref<const Eigen::VectorXd>& v) {
  return scaler.apply(v);
}

} // namespace emg
