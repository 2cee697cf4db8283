#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "emg/features.hpp"
#include "emg/recording.hpp"

namespace emg {

inline constexpr std::string_view kModelVersion = "emg-mlp/1";

/// Log-sigmoid 1/(1+e^-x), evaluated without overflow for any finite x.
inline double logsig(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename Derived>
auto logsig(const Eigen::MatrixBase<Derived>& x) {
  return x.unaryExpr([](typename Derived::Scalar v) { return static_cast<typename Derived::Scalar>(logsig(v)); });
}

/// Feedforward network with log-sigmoid units in every layer. Inputs are
/// z-scored by `scaler` before the first layer.
struct MlpModel {
  std::string version{kModelVersion};
  std::vector<int> layer_sizes;
  std::vector<Eigen::MatrixXd> weights;  ///< weights[l] is (layer_sizes[l+1] x layer_sizes[l])
  std::vector<Eigen::VectorXd> biases;
  FeatureScaler scaler;
  std::vector<Gesture> classes;

  int input_dim() const { return layer_sizes.front(); }
  int output_dim() const { return layer_sizes.back(); }
  std::size_t layer_count() const { return weights.size(); }
};

bool operator==(const MlpModel& a, const MlpModel& b);

/// Zero weights and biases, identity scaler.
MlpModel make_model(std::vector<int> layer_sizes, std::vector<Gesture> classes = {});

/// Shapes, finiteness, class count and version. Throws emg::Error.
void validate(const MlpModel& model);

struct TrainConfig {
  std::vector<int> hidden{40};
  double learning_rate = 0.05;
  double momentum = 0.9;
  int max_epochs = 300;
  double target_mse = 1e-4;
  /// 0 disables the held-out split; early stopping then watches training MSE.
  double validation_fraction = 0.2;
  int patience = 40;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& cfg);

/// Network output for an input already in network (scaled) space.
Eigen::VectorXd propagate(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Applies the model's scaler, then propagates.
Eigen::VectorXd forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct Classification {
  Gesture gesture = Gesture::Rest;
  double confidence = 0;
};

/// Argmax over `outputs`; ties go to the lowest index.
Classification decide(const std::vector<Gesture>& classes, const Eigen::Ref<const Eigen::VectorXd>& outputs);
Classification classify(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
};

/// Per-sample loss: mean over output units of (y - t)^2.
double sample_loss(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& target);

/// Analytic gradient of sample_loss with respect to every weight and bias.
Gradients backprop(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& target);

using GradientFn = std::function<Gradients(const MlpModel&, const Eigen::Ref<const Eigen::VectorXd>&,
                                           const Eigen::Ref<const Eigen::VectorXd>&)>;

/// Largest relative deviation between `gradient` and central finite
/// differences of sample_loss, over every parameter. Relative error is
/// |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-7;
double grad_check(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& target, const GradientFn& gradient = backprop,
                  double step = 1e-5);

struct TrainingSample {
  Eigen::VectorXd x;
  Eigen::VectorXd target;
};

struct LabeledVector {
  Eigen::VectorXd x;
  Gesture label = Gesture::Rest;
};

struct EpochStats {
  int epoch = 0;
  double train_mse = 0;
  /// Equal to train_mse when training without a validation split.
  double validation_mse = 0;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochStats> history;  ///< history[0] is the untrained network
  int best_epoch = 0;
};

/// Stochastic backpropagation with momentum on raw (x, target) pairs.
TrainResult train_network(const std::vector<int>& layer_sizes, const std::vector<TrainingSample>& data,
                          const TrainConfig& cfg);

/// Fits the scaler, one-hot encodes the labels (classes in Gesture order)
/// and trains a [dim, hidden..., classes] network.
TrainResult train(const std::vector<LabeledVector>& dataset, const TrainConfig& cfg);

std::string save_model(const MlpModel& model);
MlpModel load_model(std::string_view text);
void save_model_file(const MlpModel& model, const std::string& path);
MlpModel load_model_file(const std::string& path);

} // namespace emg
