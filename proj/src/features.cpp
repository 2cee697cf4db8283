#include "emg/features.hpp"

#include <algorithm>
#include <string>

namespace emg {

Eigen::VectorXd feature_vector(const Eigen::Ref<const Eigen::MatrixXd>& window, const WaveletSpec& spec,
                               int levels) {
  if (window.cols() != kChannels)
    throw DimensionError("expected " + std::to_string(kChannels) + " channels, got " +
                         std::to_string(window.cols()));
  Eigen::VectorXd out(feature_dimension(levels));
  Eigen::Index pos = 0;
  auto put = [&](const StatMoments<double>& m) {
    out.segment<4>(pos) << m.mean, m.sigma, m.skewness, m.kurtosis;
    pos += kMomentsPerBand;
  };
  for (Eigen::Index c = 0; c < window.cols(); ++c) {
    const SubbandSet sb = dwt_decompose(window.col(c), spec, levels);
    for (const auto& d : sb.details) put(moments(d));
    put(moments(sb.approx));
  }
  return out;
}

FeatureScaler FeatureScaler::identity(Eigen::Index dim) {
  return {Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim)};
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::Ref<const Eigen::VectorXd>& v) const {
  if (v.size() != means.size())
    throw DimensionError("scaler expects dimension " + std::to_string(means.size()) + ", got " +
                         std::to_string(v.size()));
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (sigmas[i] > 0) out[i] = (v[i] - means[i]) / sigmas[i];
  return out;
}

FeatureScaler fit_scaler(const std::vector<Eigen::VectorXd>& vectors) {
  if (vectors.size() < 2) throw Error("fit_scaler needs at least 2 vectors");
  const Eigen::Index dim = vectors.front().size();
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
  for (const auto& v : vectors) {
    if (v.size() != dim)
      throw DimensionError("fit_scaler: dimension mismatch (" + std::to_string(v.size()) + " vs " +
                           std::to_string(dim) + ")");
    sum += v;
  }
  const double n = static_cast<double>(vectors.size());
  FeatureScaler sc;
  sc.means = sum / n;
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(dim);
  for (const auto& v : vectors) ss += (v - sc.means).cwiseAbs2();
  sc.sigmas = (ss / n).cwiseSqrt();
  // Spread indistinguishable from rounding noise counts as zero.
  for (Eigen::Index i = 0; i < dim; ++i)
    if (sc.sigmas[i] <= kDegenerateSigma * std::max(1.0, std::abs(sc.means[i]))) sc.sigmas[i] = 0;
  return sc;
}

} // namespace emg
