#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "emg/mlp.hpp"

namespace emg {

/// Rows are true classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<Gesture> classes;
  Eigen::Matrix<long, Eigen::Dynamic, Eigen::Dynamic> counts;

  explicit ConfusionMatrix(std::vector<Gesture> cls = {});
  long total() const { return counts.sum(); }
  double accuracy() const;
  Eigen::Index index_of(Gesture g) const;
  void add(Gesture truth, Gesture predicted);

  friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) {
    return a.classes == b.classes && a.counts.rows() == b.counts.rows() && a.counts == b.counts;
  }
};

struct DatasetSplit {
  std::vector<LabeledVector> train;
  std::vector<LabeledVector> test;
};

/// Stratified split: each class contributes round(fraction * n_c) samples
/// (clamped to [1, n_c - 1]) to the training partition. Original order is
/// kept inside each partition.
DatasetSplit split(const std::vector<LabeledVector>& dataset, double train_fraction, std::uint64_t seed);

struct Evaluation {
  ConfusionMatrix matrix;
  double accuracy = 0;
};

using Predictor = std::function<Gesture(const Eigen::VectorXd&)>;

Evaluation evaluate(const std::vector<Gesture>& classes, const std::vector<LabeledVector>& test,
                    const Predictor& predict);
Evaluation evaluate(const MlpModel& model, const std::vector<LabeledVector>& test);

/// Aligned table followed by `accuracy=<0.xxxx>`.
std::string format_table(const ConfusionMatrix& m);
/// One `true,predicted,count` line per nonzero cell.
std::string format_csv(const ConfusionMatrix& m);

} // namespace emg
