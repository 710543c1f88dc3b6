#include <doctest.h>

#include <cmath>

#include "fsnc/nn.hpp"
#include "helpers.hpp"

using namespace fsnc;

TEST_CASE("uniform logits give ln 2") {
  DenseMatrix logits(1, 2);
  const std::vector<int> targets = {0};
  const CeResult res = softmax_ce(logits, targets);
  CHECK(res.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("extreme logits neither overflow nor lose the answer") {
  DenseMatrix logits(1, 2);
  logits.at(0, 0) = 1000.0;
  logits.at(0, 1) = -1000.0;
  const std::vector<int> targets = {0};
  const CeResult res = softmax_ce(logits, targets);
  CHECK(std::isfinite(res.loss));
  CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("softmax rows sum to one") {
  RngStream rng(31);
  DenseMatrix logits(6, 5);
  for (double& v : logits.values) v = rng.uniform(-30.0, 30.0);
  const DenseMatrix p = softmax(logits);
  for (int i = 0; i < p.rows; ++i) {
    double sum = 0.0;
    for (int j = 0; j < p.cols; ++j) sum += p.at(i, j);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("cross-entropy gradient matches central differences") {
  RngStream rng(32);
  DenseMatrix logits(5, 3);
  for (double& v : logits.values) v = rng.uniform(-2.0, 2.0);
  std::vector<int> targets(5);
  for (int& t : targets) t = static_cast<int>(rng.bounded(3));

  const CeResult res = softmax_ce(logits, targets);
  const double h = 1e-6;
  for (std::size_t k = 0; k < logits.values.size(); ++k) {
    DenseMatrix bumped = logits;
    bumped.values[k] += h;
    const double plus = softmax_ce(bumped, targets).loss;
    bumped.values[k] -= 2.0 * h;
    const double minus = softmax_ce(bumped, targets).loss;
    const double numeric = (plus - minus) / (2.0 * h);
    const double analytic = res.grad_logits.values[k];
    CHECK(std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic)) <= 1e-6);
  }
}

TEST_CASE("cross-entropy rejects bad input") {
  DenseMatrix logits(2, 3);
  CHECK_THROWS(softmax_ce(logits, std::vector<int>{0, 7}));
  logits.at(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS(softmax_ce(logits, std::vector<int>{0, 1}));
}

TEST_CASE("adam with zero gradient and zero decay is a no-op") {
  ParamSet params;
  RngStream rng(33);
  params.add("w", glorot_uniform(3, 4, rng));
  const ParamSet before = params;
  GradSet grads;
  grads.add("w", DenseMatrix(3, 4));
  AdamConfig cfg;
  cfg.weight_decay = 0.0;
  OptimizerState state = make_adam(params, cfg);
  for (int i = 0; i < 5; ++i) adam_step(params, grads, state);
  CHECK(params.equals(before));
}

TEST_CASE("adam with zero gradient and positive decay shrinks by lr*wd per step") {
  ParamSet params;
  DenseMatrix w(1, 1);
  w.at(0, 0) = 2.0;
  params.add("w", w);
  GradSet grads;
  grads.add("w", DenseMatrix(1, 1));
  AdamConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.5;
  OptimizerState state = make_adam(params, cfg);
  adam_step(params, grads, state);
  CHECK(params.at("w").at(0, 0) == doctest::Approx(2.0 * (1.0 - 0.1 * 0.5)).epsilon(1e-15));
  adam_step(params, grads, state);
  CHECK(params.at("w").at(0, 0) == doctest::Approx(2.0 * 0.95 * 0.95).epsilon(1e-15));
}

namespace {

/// Scalar Adam simulation, written independently of the production kernel.
double simulate_adam_on_square(double w0, double lr, int steps) {
  double w = w0, m = 0.0, v = 0.0;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  for (int t = 1; t <= steps; ++t) {
    const double g = 2.0 * w;  // d/dw of w^2
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const double mh = m / (1 - std::pow(b1, t));
    const double vh = v / (1 - std::pow(b2, t));
    w -= lr * mh / (std::sqrt(vh) + eps);
  }
  return w;
}

}  // namespace

TEST_CASE("adam drives a scalar quadratic to zero and matches the simulation") {
  const double expected = simulate_adam_on_square(1.0, 0.1, 200);
  CHECK(std::abs(expected) < 1e-3);  // oracle's own convergence

  ParamSet params;
  DenseMatrix w(1, 1);
  w.at(0, 0) = 1.0;
  params.add("w", w);
  AdamConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.0;
  OptimizerState state = make_adam(params, cfg);
  for (int t = 0; t < 200; ++t) {
    GradSet grads;
    DenseMatrix g(1, 1);
    g.at(0, 0) = 2.0 * params.at("w").at(0, 0);
    grads.add("w", g);
    adam_step(params, grads, state);
  }
  CHECK(params.at("w").at(0, 0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(params.at("w").at(0, 0)) < 1e-3);
}

TEST_CASE("adam rejects mismatched shapes") {
  ParamSet params;
  params.add("w", DenseMatrix(2, 2));
  GradSet grads;
  grads.add("w", DenseMatrix(3, 2));
  OptimizerState state = make_adam(params, AdamConfig{});
  CHECK_THROWS(adam_step(params, grads, state));
}

TEST_CASE("grad_check accepts a correct gradient and flags a corrupted one") {
  // loss(p) = sum p_i^2; gradient 2p
  RngStream rng(34);
  ParamSet params;
  params.add("w", glorot_uniform(4, 3, rng));
  const auto loss_fn = [](const ParamSet& p) {
    double sum = 0.0;
    for (double v : p.at("w").values) sum += v * v;
    return sum;
  };
  GradSet grads;
  DenseMatrix g = params.at("w");
  for (double& v : g.values) v *= 2.0;
  grads.add("w", g);

  RngStream check_rng(35);
  const GradCheckReport good = grad_check(loss_fn, params, grads, 1e-5, 1e-6, 200, check_rng);
  CHECK(good.ok());
  CHECK(good.coordinates_checked == 12);

  // sign-flip one coordinate; the checker must notice
  grads.at("w").values[5] = -grads.at("w").values[5];
  RngStream check_rng2(36);
  const GradCheckReport bad = grad_check(loss_fn, params, grads, 1e-5, 1e-6, 200, check_rng2);
  CHECK_FALSE(bad.ok());
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].index == 5);
}

TEST_CASE("parameter checkpoints roundtrip bit-exactly") {
  RngStream rng(37);
  ParamSet params;
  params.add("enc.W1", glorot_uniform(5, 7, rng));
  params.add("head.b", glorot_uniform(1, 3, rng));

  fsnc::testing::TempDir tmp("params");
  const auto path = tmp.path() / "ckpt.json";
  save_params(params, path);
  const ParamSet loaded = load_params(path);
  CHECK(loaded.equals(params));
}
