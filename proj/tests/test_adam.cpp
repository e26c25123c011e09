#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "protograph/adam.hpp"
#include "protograph/errors.hpp"
#include "protograph/rng.hpp"

using namespace protograph;

namespace {

// Scalar reference Adam, kept deliberately independent of the implementation.
struct ScalarAdam {
  double m = 0.0, v = 0.0;
  long t = 0;
  double step(double x, double g, const AdamConfig& c) {
    ++t;
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g * g;
    double mhat = m / (1.0 - std::pow(c.beta1, static_cast<double>(t)));
    double vhat = v / (1.0 - std::pow(c.beta2, static_cast<double>(t)));
    return x - c.lr * mhat / (std::sqrt(vhat) + c.eps);
  }
};

}  // namespace

TEST_CASE("first step moves by almost exactly the learning rate") {
  ParameterSet p;
  p.create("w", Eigen::MatrixXd::Constant(1, 1, 1.0));
  AdamOptimizer opt;
  GradMap g{{"w", Eigen::MatrixXd::Constant(1, 1, 1.0)}};
  opt.step(p, g);
  // bias-corrected m-hat/sqrt(v-hat) = 1 at t=1; eps shifts it negligibly
  CHECK(p.at("w")(0, 0) == doctest::Approx(1.0 - 0.005).epsilon(1e-6));
  CHECK(opt.step_count() == 1);
}

TEST_CASE("zero gradients are a fixed point") {
  ParameterSet p;
  p.create("w", Eigen::MatrixXd::Constant(2, 2, 3.0));
  AdamOptimizer opt;
  GradMap g{{"w", Eigen::MatrixXd::Zero(2, 2)}};
  for (int i = 0; i < 5; ++i) opt.step(p, g);
  CHECK(p.at("w") == Eigen::MatrixXd::Constant(2, 2, 3.0));
  CHECK(opt.step_count() == 5);
}

TEST_CASE("identical params with identical grads update identically") {
  ParameterSet p;
  p.create("a", Eigen::MatrixXd::Constant(1, 3, 2.0));
  p.create("b", Eigen::MatrixXd::Constant(1, 3, 2.0));
  AdamOptimizer opt;
  Eigen::MatrixXd grad = Eigen::MatrixXd::Constant(1, 3, 0.7);
  for (int i = 0; i < 10; ++i) opt.step(p, {{"a", grad}, {"b", grad}});
  CHECK(p.at("a") == p.at("b"));
}

TEST_CASE("matches an independent scalar transcription across random steps") {
  AdamConfig cfg;
  ParameterSet p;
  p.create("w", Eigen::MatrixXd::Constant(1, 1, 0.3));
  AdamOptimizer opt(cfg);
  ScalarAdam ref;
  double x = 0.3;
  RngStream rng(123);
  for (int i = 0; i < 40; ++i) {
    double g = rng.normal();
    x = ref.step(x, g, cfg);
    opt.step(p, {{"w", Eigen::MatrixXd::Constant(1, 1, g)}});
    CHECK(p.at("w")(0, 0) == doctest::Approx(x).epsilon(1e-14));
  }
}

TEST_CASE("fused step equals per-group steps on disjoint groups") {
  Eigen::MatrixXd ga = Eigen::MatrixXd::Constant(1, 2, 0.5);
  Eigen::MatrixXd gb = Eigen::MatrixXd::Constant(2, 1, -1.5);

  ParameterSet fused;
  fused.create("a", Eigen::MatrixXd::Constant(1, 2, 1.0));
  fused.create("b", Eigen::MatrixXd::Constant(2, 1, 2.0));
  AdamOptimizer opt_fused;
  for (int i = 0; i < 7; ++i) opt_fused.step(fused, {{"a", ga}, {"b", gb}});

  ParameterSet split;
  split.create("a", Eigen::MatrixXd::Constant(1, 2, 1.0));
  split.create("b", Eigen::MatrixXd::Constant(2, 1, 2.0));
  AdamOptimizer opt_a, opt_b;
  for (int i = 0; i < 7; ++i) {
    opt_a.step(split, {{"a", ga}});
    opt_b.step(split, {{"b", gb}});
  }
  CHECK(fused.at("a") == split.at("a"));
  CHECK(fused.at("b") == split.at("b"));
}

TEST_CASE("parameters absent from the gradient map stay untouched") {
  ParameterSet p;
  p.create("a", Eigen::MatrixXd::Constant(1, 1, 1.0));
  p.create("b", Eigen::MatrixXd::Constant(1, 1, 1.0));
  AdamOptimizer opt;
  opt.step(p, {{"a", Eigen::MatrixXd::Constant(1, 1, 1.0)}});
  CHECK(p.at("b")(0, 0) == 1.0);
  CHECK(p.at("a")(0, 0) < 1.0);
}

TEST_CASE("NaN gradient aborts naming the parameter") {
  ParameterSet p;
  p.create("gate.w1", Eigen::MatrixXd::Constant(1, 1, 1.0));
  AdamOptimizer opt;
  GradMap g{{"gate.w1",
             Eigen::MatrixXd::Constant(1, 1, std::numeric_limits<double>::quiet_NaN())}};
  CHECK_THROWS_WITH_AS(opt.step(p, g), doctest::Contains("gate.w1"), NumericError);
}

TEST_CASE("reset_rows restarts momentum for the given rows only") {
  ParameterSet p;
  p.create("w", Eigen::MatrixXd::Zero(2, 1));
  AdamOptimizer opt;
  Eigen::MatrixXd g = Eigen::MatrixXd::Constant(2, 1, 1.0);
  for (int i = 0; i < 20; ++i) opt.step(p, {{"w", g}});
  double before0 = p.at("w")(0, 0);
  opt.reset_rows("w", {1});
  // One zero-grad step: row 0 still coasts on momentum, row 1 stands still.
  opt.step(p, {{"w", Eigen::MatrixXd::Zero(2, 1)}});
  CHECK(p.at("w")(0, 0) != before0);
  CHECK(p.at("w")(1, 0) == before0);  // rows were identical up to the reset
}
