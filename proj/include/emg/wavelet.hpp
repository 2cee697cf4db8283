#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace emg {

/// Orthonormal two-channel filter bank. `g` is derived from `h` by the
/// quadrature-mirror relation g[k] = (-1)^k h[L-1-k].
struct WaveletSpec {
  std::string name;
  Eigen::VectorXd h;
  Eigen::VectorXd g;

  Eigen::Index length() const { return h.size(); }
};

WaveletSpec make_wavelet(std::string name, const Eigen::VectorXd& lowpass);
WaveletSpec haar();
WaveletSpec daubechies2();
WaveletSpec daubechies4();
/// Accepts "haar", "db1" (alias of haar), "db2", "db4".
WaveletSpec wavelet_by_name(const std::string& name);

struct SubbandSet {
  int levels = 0;
  std::vector<Eigen::VectorXd> details;  ///< D1..DL
  Eigen::VectorXd approx;                ///< AL
  Eigen::Index original_len = 0;
};

struct LevelCoefficients {
  Eigen::VectorXd approx;
  Eigen::VectorXd detail;
};

/// One analysis step with periodic extension:
///   approx[k] = sum_n h[n] x[(2k+n) mod N],  detail[k] = sum_n g[n] x[(2k+n) mod N]
LevelCoefficients dwt_level(const Eigen::Ref<const Eigen::VectorXd>& signal, const WaveletSpec& spec);

/// Inverse of dwt_level (the transpose of the orthonormal analysis operator).
Eigen::VectorXd idwt_level(const Eigen::Ref<const Eigen::VectorXd>& approx,
                           const Eigen::Ref<const Eigen::VectorXd>& detail, const WaveletSpec& spec);

SubbandSet dwt_decompose(const Eigen::Ref<const Eigen::VectorXd>& signal, const WaveletSpec& spec,
                         int levels);
Eigen::VectorXd idwt_reconstruct(const SubbandSet& sb, const WaveletSpec& spec);

/// Throws emg::ConfigError unless a length-n signal can be decomposed to `levels`.
void check_decomposable(Eigen::Index n, const WaveletSpec& spec, int levels);

} // namespace emg
