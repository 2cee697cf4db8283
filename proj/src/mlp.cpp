#include "emg/mlp.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "emg/error.hpp"
#include "json.hpp"

namespace emg {

namespace {

using json = nlohmann::ordered_json;

std::vector<Eigen::VectorXd> activations(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  std::vector<Eigen::VectorXd> acts;
  acts.reserve(model.layer_count() + 1);
  acts.emplace_back(x);
  for (std::size_t l = 0; l < model.layer_count(); ++l)
    acts.emplace_back(logsig(model.weights[l] * acts.back() + model.biases[l]));
  return acts;
}

void check_input(const MlpModel& model, Eigen::Index dim) {
  if (dim != model.input_dim())
    throw DimensionError("model expects input dimension " + std::to_string(model.input_dim()) +
                         ", got " + std::to_string(dim));
}

double dataset_mse(const MlpModel& model, const std::vector<TrainingSample>& data,
                   const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0;
  double total = 0;
  for (auto i : idx) total += sample_loss(model, data[i].x, data[i].target);
  return total / static_cast<double>(idx.size());
}

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m) { return m.allFinite(); }

} // namespace

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (a.version != b.version || a.layer_sizes != b.layer_sizes || a.classes != b.classes ||
      !(a.scaler == b.scaler) || a.weights.size() != b.weights.size() || a.biases.size() != b.biases.size())
    return false;
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() || a.weights[l].cols() != b.weights[l].cols() ||
        a.weights[l] != b.weights[l])
      return false;
    if (a.biases[l].size() != b.biases[l].size() || a.biases[l] != b.biases[l]) return false;
  }
  return true;
}

MlpModel make_model(std::vector<int> layer_sizes, std::vector<Gesture> classes) {
  if (layer_sizes.size() < 2) throw ConfigError("an MLP needs at least an input and an output layer");
  for (int n : layer_sizes)
    if (n < 1) throw ConfigError("layer sizes must be positive");
  MlpModel m;
  m.layer_sizes = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
    m.weights.push_back(Eigen::MatrixXd::Zero(m.layer_sizes[l + 1], m.layer_sizes[l]));
    m.biases.push_back(Eigen::VectorXd::Zero(m.layer_sizes[l + 1]));
  }
  m.scaler = FeatureScaler::identity(m.layer_sizes.front());
  m.classes = std::move(classes);
  return m;
}

void validate(const MlpModel& model) {
  if (model.version != kModelVersion)
    throw Error("unsupported model version '" + model.version + "' (expected '" +
                std::string(kModelVersion) + "')");
  if (model.layer_sizes.size() < 2) throw Error("model needs at least two layers");
  if (model.weights.size() + 1 != model.layer_sizes.size() || model.biases.size() != model.weights.size())
    throw Error("model layer count does not match layer_sizes");
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    if (model.weights[l].rows() != model.layer_sizes[l + 1] || model.weights[l].cols() != model.layer_sizes[l])
      throw Error("weight matrix " + std::to_string(l) + " has shape " +
                  std::to_string(model.weights[l].rows()) + "x" + std::to_string(model.weights[l].cols()) +
                  ", expected " + std::to_string(model.layer_sizes[l + 1]) + "x" +
                  std::to_string(model.layer_sizes[l]));
    if (model.biases[l].size() != model.layer_sizes[l + 1])
      throw Error("bias vector " + std::to_string(l) + " has the wrong length");
    if (!all_finite(model.weights[l]) || !all_finite(model.biases[l]))
      throw Error("model layer " + std::to_string(l) + " has non-finite parameters");
  }
  if (model.scaler.means.size() != model.input_dim() || model.scaler.sigmas.size() != model.input_dim())
    throw Error("scaler dimension does not match model input");
  if (!all_finite(model.scaler.means) || !all_finite(model.scaler.sigmas))
    throw Error("scaler has non-finite parameters");
  if (!model.classes.empty() && static_cast<int>(model.classes.size()) != model.output_dim())
    throw Error("model has " + std::to_string(model.classes.size()) + " classes but " +
                std::to_string(model.output_dim()) + " output units");
}

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (!(cfg.momentum >= 0 && cfg.momentum < 1)) throw ConfigError("momentum must lie in [0, 1)");
  if (cfg.max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (!(cfg.target_mse >= 0)) throw ConfigError("target_mse must be non-negative");
  if (!(cfg.validation_fraction >= 0 && cfg.validation_fraction <= 0.5))
    throw ConfigError("validation_fraction must lie in [0, 0.5]");
  if (cfg.patience < 1) throw ConfigError("patience must be >= 1");
  for (int h : cfg.hidden)
    if (h < 1) throw ConfigError("hidden layer sizes must be positive");
}

Eigen::VectorXd propagate(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_input(model, x.size());
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < model.layer_count(); ++l) a = logsig(model.weights[l] * a + model.biases[l]);
  return a;
}

Eigen::VectorXd forward(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  check_input(model, x.size());
  return propagate(model, model.scaler.apply(x));
}

Classification decide(const std::vector<Gesture>& classes, const Eigen::Ref<const Eigen::VectorXd>& outputs) {
  if (outputs.size() == 0 || static_cast<std::size_t>(outputs.size()) != classes.size())
    throw DimensionError("output vector does not match the class list");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < outputs.size(); ++i)
    if (outputs[i] > outputs[best]) best = i;
  return {classes[static_cast<std::size_t>(best)], outputs[best]};
}

Classification classify(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return decide(model.classes, forward(model, x));
}

double sample_loss(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& target) {
  return (propagate(model, x) - target).squaredNorm() / static_cast<double>(target.size());
}

Gradients backprop(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& target) {
  check_input(model, x.size());
  if (target.size() != model.output_dim())
    throw DimensionError("target dimension does not match model output");
  const auto acts = activations(model, x);
  const std::size_t L = model.layer_count();
  Gradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  // delta = dLoss/dz for the current layer, z = W a + b.
  const Eigen::ArrayXd y = acts[L].array();
  Eigen::VectorXd delta =
      ((2.0 / static_cast<double>(target.size())) * (y - target.array()) * y * (1.0 - y)).matrix();
  for (std::size_t l = L; l-- > 0;) {
    g.weights[l] = delta * acts[l].transpose();
    g.biases[l] = delta;
    if (l > 0) {
      const Eigen::ArrayXd a = acts[l].array();
      delta = ((model.weights[l].transpose() * delta).array() * a * (1.0 - a)).matrix();
    }
  }
  return g;
}

double grad_check(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                  const Eigen::Ref<const Eigen::VectorXd>& target, const GradientFn& gradient, double step) {
  const Gradients analytic = gradient(model, x, target);
  MlpModel probe = model;
  double worst = 0;
  auto compare = [&](double& param, double a) {
    const double saved = param;
    param = saved + step;
    const double up = sample_loss(probe, x, target);
    param = saved - step;
    const double down = sample_loss(probe, x, target);
    param = saved;
    const double numeric = (up - down) / (2 * step);
    const double denom = std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  };
  for (std::size_t l = 0; l < probe.layer_count(); ++l) {
    for (Eigen::Index i = 0; i < probe.weights[l].size(); ++i)
      compare(probe.weights[l].data()[i], analytic.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < probe.biases[l].size(); ++i) compare(probe.biases[l][i], analytic.biases[l][i]);
  }
  return worst;
}

TrainResult train_network(const std::vector<int>& layer_sizes, const std::vector<TrainingSample>& data,
                          const TrainConfig& cfg) {
  validate(cfg);
  if (data.empty()) throw Error("training set is empty");
  MlpModel model = make_model(layer_sizes);
  for (const auto& s : data) {
    check_input(model, s.x.size());
    if (s.target.size() != model.output_dim())
      throw DimensionError("target dimension does not match the output layer");
  }

  std::mt19937_64 rng(cfg.seed);
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const double r = 1.0 / std::sqrt(static_cast<double>(model.layer_sizes[l]));
    std::uniform_real_distribution<double> init(-r, r);
    for (Eigen::Index i = 0; i < model.weights[l].size(); ++i) model.weights[l].data()[i] = init(rng);
    for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) model.biases[l][i] = init(rng);
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<std::size_t> train_idx = order, val_idx;
  if (cfg.validation_fraction > 0 && data.size() >= 2) {
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(cfg.validation_fraction * static_cast<double>(data.size()))), 1,
        data.size() - 1);
    val_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val_idx.begin(), val_idx.end());
    std::sort(train_idx.begin(), train_idx.end());
  }

  auto measure = [&](int epoch) {
    EpochStats st{epoch, dataset_mse(model, data, train_idx), 0};
    st.validation_mse = val_idx.empty() ? st.train_mse : dataset_mse(model, data, val_idx);
    return st;
  };

  TrainResult result;
  result.history.push_back(measure(0));
  result.model = model;
  double best = result.history.back().validation_mse;
  int since_best = 0;

  Gradients velocity;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    velocity.weights.push_back(Eigen::MatrixXd::Zero(model.weights[l].rows(), model.weights[l].cols()));
    velocity.biases.push_back(Eigen::VectorXd::Zero(model.biases[l].size()));
  }

  for (int epoch = 1; epoch <= cfg.max_epochs && best > cfg.target_mse; ++epoch) {
    std::shuffle(train_idx.begin(), train_idx.end(), rng);
    for (auto i : train_idx) {
      const Gradients g = backprop(model, data[i].x, data[i].target);
      for (std::size_t l = 0; l < model.layer_count(); ++l) {
        velocity.weights[l] = cfg.momentum * velocity.weights[l] - cfg.learning_rate * g.weights[l];
        velocity.biases[l] = cfg.momentum * velocity.biases[l] - cfg.learning_rate * g.biases[l];
        model.weights[l] += velocity.weights[l];
        model.biases[l] += velocity.biases[l];
      }
    }
    std::sort(train_idx.begin(), train_idx.end());
    result.history.push_back(measure(epoch));
    const double monitored = result.history.back().validation_mse;
    if (!std::isfinite(monitored)) throw Error("training diverged at epoch " + std::to_string(epoch));
    if (monitored < best) {
      best = monitored;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

TrainResult train(const std::vector<LabeledVector>& dataset, const TrainConfig& cfg) {
  validate(cfg);
  if (dataset.empty()) throw Error("training set is empty");
  std::set<Gesture> present;
  for (const auto& s : dataset) present.insert(s.label);
  if (present.size() < 2) throw Error("training needs at least 2 classes, got " + std::to_string(present.size()));
  const std::vector<Gesture> classes(present.begin(), present.end());
  const Eigen::Index dim = dataset.front().x.size();

  std::vector<Eigen::VectorXd> xs;
  xs.reserve(dataset.size());
  for (const auto& s : dataset) {
    if (s.x.size() != dim)
      throw DimensionError("feature dimension mismatch: " + std::to_string(s.x.size()) + " vs " +
                           std::to_string(dim));
    xs.push_back(s.x);
  }
  const FeatureScaler scaler = fit_scaler(xs);

  std::vector<TrainingSample> data;
  data.reserve(dataset.size());
  for (const auto& s : dataset) {
    Eigen::VectorXd t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
    t[std::distance(classes.begin(), std::find(classes.begin(), classes.end(), s.label))] = 1.0;
    data.push_back({scaler.apply(s.x), std::move(t)});
  }

  std::vector<int> sizes{static_cast<int>(dim)};
  sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
  sizes.push_back(static_cast<int>(classes.size()));

  TrainResult result = train_network(sizes, data, cfg);
  result.model.scaler = scaler;
  result.model.classes = classes;
  return result;
}

std::string save_model(const MlpModel& model) {
  validate(model);
  auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  json doc;
  doc["version"] = model.version;
  doc["layer_sizes"] = model.layer_sizes;
  json classes = json::array();
  for (auto g : model.classes) classes.push_back(std::string(to_string(g)));
  doc["classes"] = classes;
  json weights = json::array();
  for (const auto& w : model.weights) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    weights.push_back(flat);
  }
  doc["weights"] = weights;
  json biases = json::array();
  for (const auto& b : model.biases) biases.push_back(vec(b));
  doc["biases"] = biases;
  doc["scaler"] = {{"means", vec(model.scaler.means)}, {"sigmas", vec(model.scaler.sigmas)}};
  return doc.dump(1) + "\n";
}

MlpModel load_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("model file is not valid JSON: ") + e.what());
  }
  auto to_vec = [](const json& arr, const char* what) {
    if (!arr.is_array()) throw Error(std::string("model field '") + what + "' must be an array");
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number()) throw Error(std::string("non-numeric entry in '") + what + "'");
      v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    }
    return v;
  };
  try {
    MlpModel m;
    m.version = doc.at("version").get<std::string>();
    if (m.version != kModelVersion)
      throw Error("unsupported model version '" + m.version + "' (expected '" + std::string(kModelVersion) + "')");
    m.layer_sizes = doc.at("layer_sizes").get<std::vector<int>>();
    if (m.layer_sizes.size() < 2) throw Error("model needs at least two layers");
    for (int n : m.layer_sizes)
      if (n < 1) throw Error("layer sizes must be positive");
    for (const auto& c : doc.at("classes")) {
      auto g = parse_gesture(c.get<std::string>());
      if (!g) throw Error("unknown class '" + c.get<std::string>() + "' in model");
      m.classes.push_back(*g);
    }
    const auto& weights = doc.at("weights");
    const auto& biases = doc.at("biases");
    if (weights.size() + 1 != m.layer_sizes.size() || biases.size() + 1 != m.layer_sizes.size())
      throw Error("model layer count does not match layer_sizes");
    for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
      const Eigen::VectorXd flat = to_vec(weights[l], "weights");
      const int rows = m.layer_sizes[l + 1], cols = m.layer_sizes[l];
      if (flat.size() != Eigen::Index{rows} * cols)
        throw Error("weight matrix " + std::to_string(l) + " has " + std::to_string(flat.size()) +
                    " entries, expected " + std::to_string(rows) + "x" + std::to_string(cols));
      Eigen::MatrixXd w(rows, cols);
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) w(r, c) = flat[Eigen::Index{r} * cols + c];
      m.weights.push_back(std::move(w));
      m.biases.push_back(to_vec(biases[l], "biases"));
    }
    m.scaler.means = to_vec(doc.at("scaler").at("means"), "scaler.means");
    m.scaler.sigmas = to_vec(doc.at("scaler").at("sigmas"), "scaler.sigmas");
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model file: ") + e.what());
  }
}

void save_model_file(const MlpModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write model '" + path + "'");
  out << save_model(model);
  if (!out) throw Error("write failed for '" + path + "'");
}

MlpModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str());
}

} // namespace emg
