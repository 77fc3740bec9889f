#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gholder/hyper.hpp"
#include "gholder/numint.hpp"

using namespace gholder;
using hyper::Direction;
using hyper::HyperQuery;
using hyper::OuParams;

TEST_CASE("ou_apply closes the Hermite recursion for x^2") {
  const NumericFn sq = make_fn(1, [](const VectorXd& x) { return x(0) * x(0); });
  for (double t : {0.1, 0.5, 2.0}) {
    for (double x : {-1.5, 0.0, 2.0}) {
      VectorXd pt(1);
      pt(0) = x;
      const double expected = std::exp(-2.0 * t) * x * x + (1.0 - std::exp(-2.0 * t));
      CHECK(hyper::ou_apply(sq, {t, 1}, pt, 2) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("ou_apply endpoints: identity at t = 0, averaging as t grows") {
  const NumericFn f = make_fn(1, [](const VectorXd& x) { return std::cos(x(0)); });
  VectorXd pt(1);
  pt(0) = 0.7;
  CHECK(hyper::ou_apply(f, {0.0, 1}, pt, 32) == doctest::Approx(std::cos(0.7)).epsilon(1e-12));

  numint::QuadratureSpec spec;
  spec.nodes_per_dim = 48;
  const double mean = numint::integrate(f, spec).value;
  CHECK(hyper::ou_apply(f, {20.0, 1}, pt, 48) == doctest::Approx(mean).epsilon(1e-8));
}

TEST_CASE("ou_apply semigroup property on polynomials") {
  const NumericFn f = make_fn(1, [](const VectorXd& x) {
    return 1.0 + x(0) + 0.5 * std::pow(x(0), 3);
  });
  const double s = 0.4, t = 0.9;
  const NumericFn pt_f =
      make_fn(1, [&](const VectorXd& x) { return hyper::ou_apply(f, {t, 1}, x, 24); });
  for (double x : {-2.0, 0.3, 1.1}) {
    VectorXd v(1);
    v(0) = x;
    CHECK(hyper::ou_apply(pt_f, {s, 1}, v, 24) ==
          doctest::Approx(hyper::ou_apply(f, {s + t, 1}, v, 24)).epsilon(1e-8));
  }
}

TEST_CASE("ou_apply input validation") {
  const NumericFn bad = make_fn(1, [](const VectorXd&) { return kInf; });
  VectorXd pt(1);
  pt(0) = 0.0;
  CHECK_THROWS_AS(hyper::ou_apply(bad, {1.0, 1}, pt, 8), Error);
  const NumericFn f = make_fn(1, [](const VectorXd& x) { return x(0); });
  CHECK_THROWS_AS(hyper::ou_apply(f, {1.0, 1}, pt, 1), Error);
}

TEST_CASE("hyper_condition closed form") {
  const double t_sharp = 0.5 * std::log(3.0);
  CHECK(hyper::hyper_condition({2.0, 4.0, t_sharp, Direction::Forward}));
  CHECK_FALSE(hyper::hyper_condition({2.0, 5.0, t_sharp, Direction::Forward}));

  const double t_half = 0.5 * std::log(2.0);  // e^{-2t} = 1/2
  CHECK(hyper::hyper_condition({0.5, 0.0, t_half, Direction::Reverse}));
  CHECK_FALSE(hyper::hyper_condition({0.9, 0.0, 0.1, Direction::Reverse}));

  CHECK_THROWS_AS(hyper::hyper_condition({1.0, 2.0, 0.5, Direction::Forward}), Error);
  CHECK_THROWS_AS(hyper::hyper_condition({2.0, 1.0, 0.5, Direction::Forward}), Error);
}

TEST_CASE("hyper_condition agrees with the covariance comparison") {
  numint::NormalSource rng(61);
  int forward = 0, reverse = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const double t = std::abs(rng.next());
    HyperQuery query;
    query.t = t;
    if (trial % 2 == 0) {
      query.direction = Direction::Forward;
      query.p = 1.0 + std::abs(rng.next()) + 1e-3;
      query.q = 1.0 + std::abs(rng.next()) + 1e-3;
      ++forward;
    } else {
      query.direction = Direction::Reverse;
      query.p = 1.0 - std::abs(rng.next()) - 1e-3;
      query.q = 1.0 - std::abs(rng.next()) - 1e-3;
      ++reverse;
    }
    const int n = 1 + trial % 3;
    CHECK(hyper::hyper_condition(query) == hyper::hyper_condition_matrix(query, n));
  }
  CHECK(forward == 500);
  CHECK(reverse == 500);
}

TEST_CASE("verify_hyper_numeric near the sharp time") {
  const double t_sharp = 0.5 * std::log(3.0);

  // Constant functions meet with equality.
  const auto flat = hyper::verify_hyper_numeric(
      make_fn(1, [](const VectorXd&) { return 1.0; }), {2.0, 4.0, t_sharp, Direction::Forward});
  CHECK(flat.verdict == hyper::NumericVerdict::Pass);
  CHECK(flat.semigroup_norm == doctest::Approx(1.0).epsilon(1e-10));

  // Exponentials are the equality family: ||P_t e^x||_4 = ||e^x||_2 = e.
  const auto expf = hyper::verify_hyper_numeric(
      make_fn(1, [](const VectorXd& x) { return std::exp(x(0)); }),
      {2.0, 4.0, t_sharp, Direction::Forward}, 64);
  CHECK(expf.verdict == hyper::NumericVerdict::Pass);
  CHECK(expf.semigroup_norm == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
  CHECK(expf.input_norm == doctest::Approx(std::exp(1.0)).epsilon(1e-8));
  CHECK(expf.mehler_consistent);

  // Below the sharp time the linear perturbation family violates the bound.
  const double t_small = 0.25 * std::log(3.0);
  bool violated = false;
  for (double eps : {0.1, 0.25, 0.5}) {
    const auto rep = hyper::verify_hyper_numeric(
        make_fn(1, [eps](const VectorXd& x) { return 1.0 + eps * x(0); }),
        {2.0, 4.0, t_small, Direction::Forward}, 64);
    if (rep.verdict == hyper::NumericVerdict::Fail) violated = true;
  }
  CHECK(violated);
}

TEST_CASE("verify_hyper_numeric reverse direction") {
  const double t = 0.5 * std::log(2.0);
  const auto rep = hyper::verify_hyper_numeric(
      make_fn(1, [](const VectorXd& x) { return std::exp(0.3 * x(0)) + 0.2; }),
      {0.5, 0.0, t, Direction::Reverse}, 48);
  CHECK(rep.verdict == hyper::NumericVerdict::Pass);
  CHECK(rep.semigroup_norm >= rep.input_norm * (1.0 - 1e-8));
  CHECK(rep.mehler_consistent);
}

TEST_CASE("mehler identity against the correlated-pair integral") {
  const auto rep = hyper::verify_hyper_numeric(
      make_fn(1, [](const VectorXd& x) { return 1.0 + 0.4 * x(0) + 0.1 * x(0) * x(0); }),
      {2.0, 4.0, 0.8, Direction::Forward}, 48);
  CHECK(rep.mehler_direct == doctest::Approx(rep.mehler_semigroup).epsilon(1e-9));
}

TEST_CASE("duality gap vanishes at the analytic optimizer") {
  numint::QuadratureSpec spec;
  spec.nodes_per_dim = 64;
  const NumericFn f = make_fn(1, [](const VectorXd& x) { return 1.0 + 0.5 * x(0) * x(0); });
  const double r = 3.0, rc = 1.5;
  const double f_norm = numint::lp_norm(f, spec, r);
  const NumericFn g = make_fn(1, [&](const VectorXd& x) {
    return std::pow(f(x), r - 1.0) / std::pow(f_norm, r - 1.0);
  });
  CHECK(numint::lp_norm(g, spec, rc) == doctest::Approx(1.0).epsilon(1e-8));
  const double pairing =
      numint::integrate(make_fn(1, [&](const VectorXd& x) { return f(x) * g(x); }), spec).value;
  CHECK(std::abs(pairing - f_norm * 1.0) <= 1e-6 * f_norm);
}

TEST_CASE("ou_product_monotonicity tracks the matrix comparison") {
  // Entire bump functions; rational bumps have poles near the real axis that slow
  // Gauss-Hermite convergence below the constancy tolerance.
  const std::vector<double> grid = {0.0, 0.25, 0.6, 1.2, 2.5};
  const NumericFn bump =
      make_fn(1, [](const VectorXd& x) { return 0.3 + std::exp(-(x(0) - 0.5) * (x(0) - 0.5)); });
  const NumericFn bump2 = make_fn(1, [](const VectorXd& x) { return 0.5 + std::exp(-x(0) * x(0)); });

  // Orthogonal blocks with unit weights: a(t) is constant.
  holder::Frame coords;
  coords.blocks = {Eigen::MatrixXd::Identity(2, 2).topRows(1),
                   Eigen::MatrixXd::Identity(2, 2).bottomRows(1)};
  auto rep = hyper::ou_product_monotonicity(coords, {1.0, 1.0}, {bump, bump2}, grid);
  CHECK(rep.matrix_le);
  CHECK(rep.matrix_ge);
  CHECK(rep.pass);
  for (size_t k = 1; k < rep.values.size(); ++k)
    CHECK(rep.values[k] == doctest::Approx(rep.values[0]).epsilon(1e-9));

  const holder::Frame frame = holder::Frame::bivariate(0.5);
  rep = hyper::ou_product_monotonicity(frame, {2.0 / 3.0, 2.0 / 3.0}, {bump, bump2}, grid);
  CHECK(rep.matrix_le);
  CHECK_FALSE(rep.matrix_ge);
  CHECK(rep.nondecreasing);
  CHECK(rep.pass);

  rep = hyper::ou_product_monotonicity(frame, {2.0, 2.0}, {bump, bump2}, grid);
  CHECK(rep.matrix_ge);
  CHECK_FALSE(rep.matrix_le);
  CHECK(rep.nonincreasing);
  CHECK(rep.pass);
}
