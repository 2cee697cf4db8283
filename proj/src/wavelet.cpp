#include "emg/wavelet.hpp"

#include <cmath>

#include "emg/error.hpp"

namespace emg {

WaveletSpec make_wavelet(std::string name, const Eigen::VectorXd& lowpass) {
  const Eigen::Index L = lowpass.size();
  if (L < 2 || L % 2 != 0) throw ConfigError("wavelet filter length must be even and >= 2");
  WaveletSpec spec{std::move(name), lowpass, Eigen::VectorXd(L)};
  for (Eigen::Index k = 0; k < L; ++k) spec.g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[L - 1 - k];
  return spec;
}

WaveletSpec haar() {
  Eigen::VectorXd h(2);
  h << M_SQRT1_2, M_SQRT1_2;
  return make_wavelet("haar", h);
}

WaveletSpec daubechies2() {
  const double s3 = std::sqrt(3.0);
  const double d = 4.0 * std::sqrt(2.0);
  Eigen::VectorXd h(4);
  h << (1 + s3) / d, (3 + s3) / d, (3 - s3) / d, (1 - s3) / d;
  return make_wavelet("db2", h);
}

WaveletSpec daubechies4() {
  Eigen::VectorXd h(8);
  h << 0.23037781330885523, 0.7148465705525415, 0.6308807679295904, -0.02798376941698385,
      -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278;
  return make_wavelet("db4", h);
}

WaveletSpec wavelet_by_name(const std::string& name) {
  if (name == "haar" || name == "db1") return haar();
  if (name == "db2") return daubechies2();
  if (name == "db4") return daubechies4();
  throw ConfigError("unknown wavelet '" + name + "' (expected haar, db2 or db4)");
}

LevelCoefficients dwt_level(const Eigen::Ref<const Eigen::VectorXd>& signal, const WaveletSpec& spec) {
  const Eigen::Index N = signal.size();
  const Eigen::Index L = spec.length();
  if (N % 2 != 0) throw ConfigError("dwt_level needs an even-length signal, got " + std::to_string(N));
  if (N < L)
    throw ConfigError("signal length " + std::to_string(N) + " is shorter than the " + spec.name +
                      " filter (" + std::to_string(L) + ")");
  LevelCoefficients out{Eigen::VectorXd::Zero(N / 2), Eigen::VectorXd::Zero(N / 2)};
  for (Eigen::Index k = 0; k < N / 2; ++k) {
    double a = 0, d = 0;
    for (Eigen::Index n = 0; n < L; ++n) {
      const double x = signal[(2 * k + n) % N];
      a += spec.h[n] * x;
      d += spec.g[n] * x;
    }
    out.approx[k] = a;
    out.detail[k] = d;
  }
  return out;
}

Eigen::VectorXd idwt_level(const Eigen::Ref<const Eigen::VectorXd>& approx,
                           const Eigen::Ref<const Eigen::VectorXd>& detail, const WaveletSpec& spec) {
  if (approx.size() != detail.size())
    throw DimensionError("approx/detail length mismatch: " + std::to_string(approx.size()) + " vs " +
                         std::to_string(detail.size()));
  const Eigen::Index N = 2 * approx.size();
  const Eigen::Index L = spec.length();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  if (N == 0) return x;
  for (Eigen::Index k = 0; k < N / 2; ++k)
    for (Eigen::Index n = 0; n < L; ++n) x[(2 * k + n) % N] += spec.h[n] * approx[k] + spec.g[n] * detail[k];
  return x;
}

void check_decomposable(Eigen::Index n, const WaveletSpec& spec, int levels) {
  if (levels < 1) throw ConfigError("decomposition levels must be >= 1");
  const Eigen::Index block = Eigen::Index{1} << levels;
  if (n % block != 0) {
    const Eigen::Index padded = (n / block + 1) * block;
    throw ConfigError("signal length " + std::to_string(n) + " is not divisible by 2^" +
                      std::to_string(levels) + " = " + std::to_string(block) + "; pad to " +
                      std::to_string(padded) + " samples (" + std::to_string(padded - n) +
                      " more)");
  }
  if (n / block < spec.length())
    throw ConfigError("signal length " + std::to_string(n) + " too short for " +
                      std::to_string(levels) + " levels of " + spec.name + ": need N/2^L >= " +
                      std::to_string(spec.length()));
}

SubbandSet dwt_decompose(const Eigen::Ref<const Eigen::VectorXd>& signal, const WaveletSpec& spec,
                         int levels) {
  check_decomposable(signal.size(), spec, levels);
  SubbandSet sb;
  sb.levels = levels;
  sb.original_len = signal.size();
  Eigen::VectorXd current = signal;
  for (int j = 0; j < levels; ++j) {
    auto step = dwt_level(current, spec);
    sb.details.push_back(std::move(step.detail));
    current = std::move(step.approx);
  }
  sb.approx = std::move(current);
  return sb;
}

Eigen::VectorXd idwt_reconstruct(const SubbandSet& sb, const WaveletSpec& spec) {
  if (sb.levels < 1 || static_cast<int>(sb.details.size()) != sb.levels)
    throw DimensionError("subband set has inconsistent level count");
  for (int j = 0; j < sb.levels; ++j) {
    if ((sb.details[j].size() << (j + 1)) != sb.original_len)
      throw DimensionError("detail band D" + std::to_string(j + 1) + " has length " +
                           std::to_string(sb.details[j].size()) + ", expected " +
                           std::to_string(sb.original_len >> (j + 1)));
  }
  if ((sb.approx.size() << sb.levels) != sb.original_len)
    throw DimensionError("approximation band has inconsistent length");
  Eigen::VectorXd current = sb.approx;
  for (int j = sb.levels - 1; j >= 0; --j) current = idwt_level(current, sb.details[j], spec);
  return current;
}

} // namespace emg
