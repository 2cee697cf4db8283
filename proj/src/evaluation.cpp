#include "emg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "emg/error.hpp"

namespace emg {

ConfusionMatrix::ConfusionMatrix(std::vector<Gesture> cls) : classes(std::move(cls)) {
  const auto n = static_cast<Eigen::Index>(classes.size());
  counts = decltype(counts)::Zero(n, n);
}

double ConfusionMatrix::accuracy() const {
  const long t = total();
  return t > 0 ? static_cast<double>(counts.trace()) / static_cast<double>(t) : 0.0;
}

Eigen::Index ConfusionMatrix::index_of(Gesture g) const {
  auto it = std::find(classes.begin(), classes.end(), g);
  if (it == classes.end()) throw Error("class " + std::string(to_string(g)) + " is not in the confusion matrix");
  return std::distance(classes.begin(), it);
}

void ConfusionMatrix::add(Gesture truth, Gesture predicted) { ++counts(index_of(truth), index_of(predicted)); }

DatasetSplit split(const std::vector<LabeledVector>& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1)) throw ConfigError("split fraction must lie in (0, 1)");
  std::map<Gesture, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.size(); ++i) by_class[dataset[i].label].push_back(i);

  std::mt19937_64 rng(seed);
  std::vector<bool> in_train(dataset.size(), false);
  for (auto& [g, idx] : by_class) {
    if (idx.size() < 2)
      throw Error("class " + std::string(to_string(g)) + " has " + std::to_string(idx.size()) +
                  " sample(s); a stratified split needs at least 2");
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto n_train = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(idx.size()))), 1, idx.size() - 1);
    for (std::size_t k = 0; k < n_train; ++k) in_train[idx[k]] = true;
  }
  DatasetSplit out;
  for (std::size_t i = 0; i < dataset.size(); ++i) (in_train[i] ? out.train : out.test).push_back(dataset[i]);
  return out;
}

Evaluation evaluate(const std::vector<Gesture>& classes, const std::vector<LabeledVector>& test,
                    const Predictor& predict) {
  ConfusionMatrix m(classes);
  for (const auto& s : test) m.add(s.label, predict(s.x));
  return {m, m.accuracy()};
}

Evaluation evaluate(const MlpModel& model, const std::vector<LabeledVector>& test) {
  for (const auto& s : test)
    if (s.x.size() != model.input_dim())
      throw DimensionError("test vector dimension " + std::to_string(s.x.size()) + " does not match model input " +
                           std::to_string(model.input_dim()));
  return evaluate(model.classes, test, [&](const Eigen::VectorXd& x) { return classify(model, x).gesture; });
}

std::string format_table(const ConfusionMatrix& m) {
  constexpr std::string_view kCorner = "true\\pred";
  std::size_t label_w = kCorner.size(), cell_w = 1;
  for (auto g : m.classes) {
    label_w = std::max(label_w, to_string(g).size());
    cell_w = std::max(cell_w, to_string(g).size());
  }
  for (Eigen::Index i = 0; i < m.counts.size(); ++i)
    cell_w = std::max(cell_w, std::to_string(m.counts.data()[i]).size());
  auto left = [](std::string_view s, std::size_t w) { return std::string(s) + std::string(w - s.size(), ' '); };
  auto right = [](std::string_view s, std::size_t w) { return std::string(w - s.size(), ' ') + std::string(s); };

  std::string out = left(kCorner, label_w);
  for (auto g : m.classes) out += "  " + right(to_string(g), cell_w);
  out += "\n";
  for (std::size_t r = 0; r < m.classes.size(); ++r) {
    out += left(to_string(m.classes[r]), label_w);
    for (std::size_t c = 0; c < m.classes.size(); ++c)
      out += "  " + right(std::to_string(m.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))), cell_w);
    out += "\n";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "accuracy=%.4f\n", m.accuracy());
  return out + buf;
}

std::string format_csv(const ConfusionMatrix& m) {
  std::string out;
  for (std::size_t r = 0; r < m.classes.size(); ++r)
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
      const long n = m.counts(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (n != 0)
        out += std::string(to_string(m.classes[r])) + "," + std::string(to_string(m.classes[c])) + "," +
               std::to_string(n) + "\n";
    }
  return out;
}

} // namespace emg
