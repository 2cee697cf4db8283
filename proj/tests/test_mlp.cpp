#include "doctest.h"

#include <random>

#include "emg/error.hpp"
#include "emg/mlp.hpp"

using namespace emg;

namespace {

MlpModel random_model(std::vector<int> sizes, std::mt19937_64& rng, double scale = 1.0) {
  MlpModel m = make_model(std::move(sizes));
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto& w : m.weights) w = w.unaryExpr([&](double) { return u(rng); });
  for (auto& b : m.biases) b = b.unaryExpr([&](double) { return u(rng); });
  return m;
}

Eigen::VectorXd random_vec(Eigen::Index n, std::mt19937_64& rng, double lo = -1, double hi = 1) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Eigen::VectorXd::NullaryExpr(n, [&] { return u(rng); });
}

Eigen::VectorXd v2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd v1(double a) { return Eigen::VectorXd::Constant(1, a); }

std::vector<TrainingSample> xor_data() {
  return {{v2(0, 0), v1(0)}, {v2(0, 1), v1(1)}, {v2(1, 0), v1(1)}, {v2(1, 1), v1(0)}};
}

} // namespace

TEST_CASE("logsig values and symmetry") {
  CHECK(logsig(0.0) == 0.5);
  CHECK(std::abs(logsig(500.0) - 1.0) < 1e-12);
  CHECK(logsig(-1000.0) >= 0.0);
  CHECK(std::isfinite(logsig(-1000.0)));
  CHECK(std::isfinite(logsig(1000.0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-30, 30);
  for (int i = 0; i < 200; ++i) {
    const double x = u(rng);
    CHECK(std::abs(logsig(-x) - (1 - logsig(x))) < 1e-15);
  }
}

TEST_CASE("zero model outputs 0.5") {
  const auto m = make_model({5, 3, 4});
  const auto y = forward(m, Eigen::VectorXd::Constant(5, 3.0));
  CHECK(y.size() == 4);
  CHECK((y.array() == 0.5).all());
}

TEST_CASE("tiny 1-1-1 network") {
  MlpModel m = make_model({1, 1, 1});
  m.weights[0](0, 0) = 1;
  m.weights[1](0, 0) = 1;
  // logsig(logsig(0)) = logsig(0.5) = 1 / (1 + exp(-0.5))
  CHECK(forward(m, v1(0))[0] == doctest::Approx(0.6224593312018546).epsilon(1e-15));
}

TEST_CASE("outputs stay inside (0,1)") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    const auto m = random_model({6, 5, 3}, rng, 5.0);
    const auto y = forward(m, random_vec(6, rng, -20, 20));
    CHECK((y.array() > 0).all());
    CHECK((y.array() < 1).all());
  }
}

TEST_CASE("dimension mismatches throw") {
  const auto m = make_model({3, 2}, {Gesture::Fist, Gesture::WaveIn});
  CHECK_THROWS_AS(forward(m, Eigen::VectorXd::Zero(4)), DimensionError);
  CHECK_THROWS_AS(classify(m, Eigen::VectorXd::Zero(2)), DimensionError);
  CHECK_THROWS_AS(backprop(m, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), DimensionError);
}

TEST_CASE("decide uses argmax with lowest-index ties") {
  Eigen::VectorXd o(3);
  o << 0.1, 0.9, 0.2;
  const auto c = decide({Gesture::Fist, Gesture::WaveIn, Gesture::WaveOut}, o);
  CHECK(c.gesture == Gesture::WaveIn);
  CHECK(c.confidence == 0.9);
  CHECK(decide({Gesture::Fist, Gesture::WaveIn}, v2(0.5, 0.5)).gesture == Gesture::Fist);
}

TEST_CASE("property: argmax is invariant under increasing transforms") {
  std::mt19937_64 rng(6);
  const std::vector<Gesture> cls(kActiveGestures.begin(), kActiveGestures.end());
  for (int t = 0; t < 200; ++t) {
    const Eigen::VectorXd o = random_vec(5, rng, 0, 1);
    const Eigen::VectorXd t1 = o.array().exp() * 3.0 + 1.0;
    const Eigen::VectorXd t2 = o.array().cube();
    const Eigen::VectorXd t3 = o.unaryExpr([](double v) { return logsig(10 * v - 4); });
    const auto g = decide(cls, o).gesture;
    CHECK(decide(cls, t1).gesture == g);
    CHECK(decide(cls, t2).gesture == g);
    CHECK(decide(cls, t3).gesture == g);
  }
}

TEST_CASE("gradient check on a random 4-3-2 network") {
  std::mt19937_64 rng(10);
  const auto m = random_model({4, 3, 2}, rng);
  CHECK(grad_check(m, random_vec(4, rng), random_vec(2, rng, 0, 1)) < 1e-5);
}

TEST_CASE("property: gradient check over seeded model/sample pairs") {
  std::mt19937_64 rng(2025);
  std::uniform_int_distribution<int> width(1, 6);
  double worst = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<int> sizes{width(rng), width(rng), width(rng)};
    if (t % 3 == 0) sizes.insert(sizes.begin() + 1, width(rng));
    const auto m = random_model(sizes, rng);
    worst = std::max(worst, grad_check(m, random_vec(sizes.front(), rng, -2, 2), random_vec(sizes.back(), rng, 0, 1)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("gradient vanishes when the output equals the target") {
  std::mt19937_64 rng(11);
  const auto m = random_model({4, 3, 2}, rng);
  const Eigen::VectorXd x = random_vec(4, rng);
  const auto g = backprop(m, x, propagate(m, x));
  double norm2 = 0;
  for (const auto& w : g.weights) norm2 += w.squaredNorm();
  for (const auto& b : g.biases) norm2 += b.squaredNorm();
  CHECK(std::sqrt(norm2) < 1e-12);
}

TEST_CASE("gradient check catches a corrupted backprop") {
  std::mt19937_64 rng(12);
  const auto m = random_model({4, 3, 2}, rng);
  const Eigen::VectorXd x = random_vec(4, rng), t = random_vec(2, rng, 0, 1);
  // Mutation: drop the hidden-layer sigmoid derivative.
  const GradientFn corrupted = [](const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& in,
                                  const Eigen::Ref<const Eigen::VectorXd>& target) {
    Gradients g = backprop(model, in, target);
    g.weights[0] *= 1.5;
    return g;
  };
  CHECK(grad_check(m, x, t, corrupted) > 1e-2);
  const GradientFn sign_flip = [](const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& in,
                                  const Eigen::Ref<const Eigen::VectorXd>& target) {
    Gradients g = backprop(model, in, target);
    g.biases[1] = -g.biases[1];
    return g;
  };
  CHECK(grad_check(m, x, t, sign_flip) > 1e-2);
}

TEST_CASE("XOR converges") {
  TrainConfig cfg;
  cfg.hidden = {4};
  cfg.learning_rate = 0.5;
  cfg.momentum = 0.9;
  cfg.max_epochs = 5000;
  cfg.validation_fraction = 0;
  cfg.target_mse = 0;
  cfg.patience = 5000;
  cfg.seed = 1;
  const auto r = train_network({2, 4, 1}, xor_data(), cfg);
  double best_train = r.history.front().train_mse;
  for (const auto& e : r.history) best_train = std::min(best_train, e.train_mse);
  CHECK(best_train < 0.05);
  CHECK(r.history.size() <= 5001);
  for (const auto& s : xor_data()) CHECK(std::abs(propagate(r.model, s.x)[0] - s.target[0]) < 0.3);
}

TEST_CASE("single sample overfits") {
  TrainConfig cfg;
  cfg.hidden = {5};
  cfg.learning_rate = 0.5;
  cfg.max_epochs = 2000;
  cfg.validation_fraction = 0;
  cfg.target_mse = 1e-3;
  cfg.patience = 2000;
  Eigen::VectorXd x(3), t(2);
  x << 0.3, -0.7, 1.1;
  t << 1, 0;
  const auto r = train_network({3, 5, 2}, {{x, t}}, cfg);
  CHECK(sample_loss(r.model, x, t) < 1e-3);
}

TEST_CASE("training is deterministic and keeps the best validation model") {
  std::mt19937_64 rng(3);
  std::vector<LabeledVector> data;
  std::normal_distribution<double> g;
  for (int i = 0; i < 60; ++i) {
    const Gesture label = kActiveGestures[static_cast<std::size_t>(i % 3)];
    Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(6, [&] { return g(rng); });
    x[i % 3] += 3.0;
    data.push_back({x, label});
  }
  TrainConfig cfg;
  cfg.hidden = {7};
  cfg.max_epochs = 60;
  cfg.seed = 99;
  const auto a = train(data, cfg);
  const auto b = train(data, cfg);
  CHECK(a.model == b.model);
  CHECK(a.history == b.history);
  CHECK(save_model(a.model) == save_model(b.model));

  double best = a.history.front().validation_mse;
  for (const auto& e : a.history) best = std::min(best, e.validation_mse);
  CHECK(best <= a.history.front().validation_mse);
  CHECK(a.history[static_cast<std::size_t>(a.best_epoch)].validation_mse == best);
  CHECK(a.model.classes == std::vector<Gesture>{Gesture::FingersSpread, Gesture::Fist, Gesture::WaveIn});
  CHECK(a.model.layer_sizes == std::vector<int>{6, 7, 3});

  cfg.seed = 100;
  CHECK_FALSE(train(data, cfg).model == a.model);
}

TEST_CASE("training input errors") {
  TrainConfig cfg;
  std::vector<LabeledVector> one_class{{Eigen::VectorXd::Zero(2), Gesture::Fist},
                                       {Eigen::VectorXd::Ones(2), Gesture::Fist}};
  CHECK_THROWS_AS(train(one_class, cfg), Error);
  std::vector<LabeledVector> ragged{{Eigen::VectorXd::Zero(2), Gesture::Fist},
                                    {Eigen::VectorXd::Ones(3), Gesture::WaveIn}};
  CHECK_THROWS_AS(train(ragged, cfg), DimensionError);
  cfg.momentum = 1.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}

TEST_CASE("model persistence roundtrip") {
  std::mt19937_64 rng(31);
  MlpModel m = random_model({6, 4, 3}, rng, 3.0);
  m.classes = {Gesture::Fist, Gesture::WaveOut, Gesture::DoubleTap};
  m.scaler.means = random_vec(6, rng, -100, 100);
  m.scaler.sigmas = random_vec(6, rng, 0.001, 10);
  m.scaler.sigmas[2] = 0;
  const std::string text = save_model(m);
  const MlpModel back = load_model(text);
  CHECK(back == m);
  CHECK(save_model(back) == text);
  for (int t = 0; t < 100; ++t) {
    const Eigen::VectorXd x = random_vec(6, rng, -200, 200);
    CHECK(forward(back, x) == forward(m, x));
    const auto c1 = classify(back, x), c2 = classify(m, x);
    CHECK(c1.gesture == c2.gesture);
    CHECK(c1.confidence == c2.confidence);
  }
}

TEST_CASE("corrupted model files are rejected") {
  std::mt19937_64 rng(32);
  MlpModel m = random_model({3, 2, 2}, rng);
  m.classes = {Gesture::Fist, Gesture::WaveIn};
  const std::string good = save_model(m);

  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  CHECK_THROWS_AS(load_model(replace("emg-mlp/1", "emg-mlp/9")), Error);
  CHECK_THROWS_AS(load_model(replace("\"layer_sizes\": [\n  3,", "\"layer_sizes\": [\n  4,")), Error);
  CHECK_THROWS_AS(load_model(replace("\"Fist\"", "\"Jazz\"")), Error);
  CHECK_THROWS_AS(load_model(replace("\"WaveIn\"", "\"WaveIn\", \"WaveOut\"")), Error);
  CHECK_THROWS_AS(load_model("{ not json"), Error);
  CHECK_THROWS_AS(load_model("{}"), Error);
  CHECK_THROWS_AS(load_model_file("/nonexistent/model.json"), Error);

  MlpModel nan_model = m;
  nan_model.weights[0](0, 0) = std::nan("");
  CHECK_THROWS_AS(validate(nan_model), Error);
  CHECK_THROWS_AS(save_model(nan_model), Error);
}
