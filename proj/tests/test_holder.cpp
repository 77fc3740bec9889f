#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gholder/holder.hpp"
#include "gholder/numint.hpp"

using namespace gholder;
using gauss::GaussianInstance;
using holder::Frame;

namespace {

GaussianInstance bivariate(double t, double p1, double p2) {
  GaussianInstance inst;
  inst.blocks.sizes = {1, 1};
  Eigen::MatrixXd T(2, 2);
  T << 1.0, t, t, 1.0;
  inst.T = symlin::SymMatrix(T);
  inst.p = {p1, p2};
  return inst;
}

Eigen::MatrixXd random_matrix(int rows, int cols, numint::NormalSource& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.next();
  return m;
}

// Random covariance with nonsingular diagonal blocks.
GaussianInstance random_instance(const std::vector<int>& sizes, numint::NormalSource& rng) {
  GaussianInstance inst;
  inst.blocks.sizes = sizes;
  const int N = inst.blocks.total();
  const Eigen::MatrixXd r = random_matrix(N, N, rng);
  inst.T = symlin::SymMatrix(
      Eigen::MatrixXd(r * r.transpose() / N + 0.05 * Eigen::MatrixXd::Identity(N, N)));
  inst.p.assign(sizes.size(), 1.0);
  return inst;
}

// Scale exponents so that P = s * blockdiag(T_ii) brackets T from the requested side.
void set_direction(GaussianInstance& inst, bool upper, double slack) {
  const int N = inst.T.dim();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < inst.blocks.count(); ++i) {
    const int off = inst.blocks.offset(i);
    const int ni = inst.blocks.sizes[i];
    B.block(off, off, ni, ni) = inst.diag_block(i).mat();
  }
  const Eigen::MatrixXd whiten = symlin::sqrt_psd(symlin::SymMatrix(B)).mat().inverse();
  const auto eig = symlin::eig_sym(symlin::SymMatrix(Eigen::MatrixXd(whiten * inst.T.mat() * whiten)));
  const double s = upper ? eig.eigenvalues(0) * (1.0 + slack)
                         : eig.eigenvalues(N - 1) * (1.0 - slack);
  inst.p.assign(inst.blocks.count(), s);
}

Frame random_frame(const std::vector<int>& sizes, int n, numint::NormalSource& rng) {
  Frame frame;
  for (int ni : sizes) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, ni, rng));
    frame.blocks.push_back(Eigen::MatrixXd(qr.householderQ()).leftCols(ni).transpose());
  }
  frame.validate();
  return frame;
}

}  // namespace

TEST_CASE("build_P examples") {
  GaussianInstance inst = bivariate(0.5, 1.5, 1.5);
  const symlin::SymMatrix P = holder::build_P(inst);
  CHECK(P(0, 0) == doctest::Approx(1.5));
  CHECK(P(1, 1) == doctest::Approx(1.5));
  CHECK(P(0, 1) == doctest::Approx(0.0));

  // p = 1 keeps the diagonal blocks.
  inst = bivariate(0.3, 1.0, 1.0);
  CHECK((holder::build_P(inst).mat() - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-15);

  GaussianInstance block;
  block.blocks.sizes = {2};
  Eigen::MatrixXd t11(2, 2);
  t11 << 2, 1, 1, 2;
  block.T = symlin::SymMatrix(t11);
  block.p = {2.0};
  const symlin::SymMatrix P2 = holder::build_P(block);
  CHECK(P2(0, 0) == doctest::Approx(4.0));
  CHECK(P2(0, 1) == doctest::Approx(2.0));
}

TEST_CASE("classify on the bivariate example") {
  // p = 1 + t: upper direction with kernel (1, 1).
  GaussianInstance inst = bivariate(0.5, 1.5, 1.5);
  holder::CriterionVerdict v = holder::classify(inst);
  CHECK(v.upper_holds);
  CHECK_FALSE(v.strict_upper);
  CHECK_FALSE(v.lower_holds);
  REQUIRE(v.kernel_basis.size() == 1);
  CHECK(std::abs(v.kernel_basis[0](0) - v.kernel_basis[0](1)) <= 1e-9);

  // p = 1 - t: lower direction with kernel (1, -1).
  inst = bivariate(0.5, 0.5, 0.5);
  v = holder::classify(inst);
  CHECK(v.lower_holds);
  CHECK_FALSE(v.upper_holds);
  REQUIRE(v.kernel_basis.size() == 1);
  CHECK(std::abs(v.kernel_basis[0](0) + v.kernel_basis[0](1)) <= 1e-9);

  // T = P: both directions, full kernel.
  inst = bivariate(0.0, 1.0, 1.0);
  v = holder::classify(inst);
  CHECK(v.upper_holds);
  CHECK(v.lower_holds);
  CHECK(v.kernel_basis.size() == 2);
  CHECK(std::string(v.direction_name()) == "Both");

  // Exponents beyond the boundary give strict comparisons and no kernel.
  inst = bivariate(0.5, 3.0, 3.0);
  v = holder::classify(inst);
  CHECK(v.strict_upper);
  CHECK(v.kernel_basis.empty());
}

TEST_CASE("holder_conjugate_check determinant identity") {
  Eigen::MatrixXd T(2, 2);
  T << 1.0, 0.5, 0.5, 1.0;
  auto rep = holder::holder_conjugate_check(symlin::SymMatrix(T), 2.0, 2.0);
  CHECK(rep.det_P_minus_T == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rep.det_T == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rep.det_identity_holds);
  CHECK(rep.upper);
  CHECK_FALSE(rep.lower);

  rep = holder::holder_conjugate_check(symlin::SymMatrix(T), 0.5, -1.0);
  CHECK(rep.det_identity_holds);
  CHECK(rep.lower);

  Eigen::MatrixXd indep = Eigen::MatrixXd::Identity(2, 2);
  rep = holder::holder_conjugate_check(symlin::SymMatrix(indep), 3.0, 1.5);
  CHECK(rep.det_P_minus_T == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.det_T == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(holder::holder_conjugate_check(symlin::SymMatrix(T), 2.0, 3.0), Error);
}

TEST_CASE("improved_exponents finds the determinant boundary") {
  Eigen::MatrixXd T(2, 2);
  T << 1.0, 0.5, 0.5, 1.0;
  const auto [q1, q2] = holder::improved_exponents(symlin::SymMatrix(T), 2.0, 2.0);
  CHECK(q1 == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(q2 == doctest::Approx(1.5).epsilon(1e-10));
  CHECK(q1 > 1.0);
  CHECK(q1 < 2.0);
  // Residual of det(Q - T) at the returned exponents.
  Eigen::MatrixXd QmT(2, 2);
  QmT << (q1 - 1.0), -0.5, -0.5, (q2 - 1.0);
  CHECK(std::abs(QmT.determinant()) <= 1e-10);
  // T <= Q < P.
  GaussianInstance check = bivariate(0.5, q1, q2);
  CHECK(holder::classify(check).upper_holds);

  // Independent case collapses to (1, 1).
  const auto [i1, i2] =
      holder::improved_exponents(symlin::SymMatrix(Eigen::MatrixXd::Identity(2, 2)), 2.0, 2.0);
  CHECK(i1 == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(i2 == doctest::Approx(1.0).epsilon(1e-9));

  // Near-singular covariance: improvement collapses toward p.
  Eigen::MatrixXd Tn(2, 2);
  Tn << 1.0, 0.999, 0.999, 1.0;
  const auto [n1, n2] = holder::improved_exponents(symlin::SymMatrix(Tn), 2.0, 2.0);
  CHECK(n1 == doctest::Approx(1.999).epsilon(1e-9));

  // Reverse side.
  const auto [r1, r2] = holder::improved_exponents(symlin::SymMatrix(T), 0.5, -1.0);
  CHECK(r1 == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(r2 == doctest::Approx(0.0).epsilon(1e-9));
  GaussianInstance lower_check = bivariate(0.5, r1, r2);
  CHECK(holder::classify(lower_check).lower_holds);

  Eigen::MatrixXd Ts(2, 2);
  Ts << 1.0, 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(holder::improved_exponents(symlin::SymMatrix(Ts), 2.0, 2.0), Error);
}

TEST_CASE("region membership and norm on the bivariate frame") {
  const Frame frame = Frame::bivariate(0.5);
  CHECK(holder::region_membership({frame, {0.5, 0.5}}));
  CHECK(holder::region_norm(frame, {0.5, 0.5}) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK_FALSE(holder::region_membership({frame, {1.0, 1.0}}));
  CHECK(holder::region_norm(frame, {1.0, 1.0}) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(holder::region_norm(frame, {0.0, 0.0}) == doctest::Approx(0.0));

  // Simplex points are members for any frame.
  numint::NormalSource rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Frame f = random_frame({1, 1, 2}, 3, rng);
    double a = std::abs(rng.next()), b = std::abs(rng.next()), c = std::abs(rng.next());
    const double sum = a + b + c + 1e-9;
    CHECK(holder::region_membership({f, {a / sum, b / sum, c / sum}}));
  }
}

TEST_CASE("region_norm matches the bivariate closed form on a grid") {
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Frame frame = Frame::bivariate(t);
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double x = i / 9.0, y = j / 9.0;
        const double closed =
            (std::sqrt((x + y) * (x + y) - 4.0 * (1.0 - t * t) * x * y) + x + y) / 2.0;
        CHECK(holder::region_norm(frame, {x, y}) == doctest::Approx(closed).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("bivariate_region_contains examples") {
  CHECK(holder::bivariate_region_contains(0.5, 0.5, 0.5));
  CHECK(holder::bivariate_region_contains(0.5, 2.0 / 3.0, 2.0 / 3.0));  // boundary
  CHECK_FALSE(holder::bivariate_region_contains(0.5, 0.7, 0.7));
  CHECK(holder::bivariate_region_contains(1.0, 0.5, 0.5));
  CHECK_FALSE(holder::bivariate_region_contains(1.0, 0.51, 0.51));
}

TEST_CASE("closed form vs operator norm route on the full grid") {
  int disagreements = 0;
  for (int it = 0; it < 20; ++it) {
    const double t = it / 19.0;
    const Frame frame = Frame::bivariate(t);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double c1 = i / 19.0, c2 = j / 19.0;
        const double norm = holder::region_norm(frame, {c1, c2});
        if (std::abs(norm - 1.0) <= 1e-9) continue;  // boundary band
        const bool via_norm = holder::region_membership({frame, {c1, c2}});
        const bool via_closed = holder::bivariate_region_contains(t, c1, c2);
        if (via_norm != via_closed) ++disagreements;
      }
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("region is convex, down-closed, and sandwiched between simplex and cube") {
  numint::NormalSource rng(37);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 3;
    std::vector<int> sizes(m, 1);
    const int n = std::max(2, m - 1);
    const Frame frame = random_frame(sizes, n, rng);

    const auto sample_member = [&]() {
      while (true) {
        std::vector<double> c(m);
        for (int i = 0; i < m; ++i) c[i] = std::abs(rng.next()) / 2.0;
        if (holder::region_membership({frame, c})) return c;
      }
    };
    const auto a = sample_member();
    const auto b = sample_member();

    // Members live in the unit cube.
    for (double ci : a) CHECK(ci <= 1.0 + 1e-9);

    // Convex combination stays inside.
    const double lam = 0.5 + 0.4 * std::tanh(rng.next());
    std::vector<double> mix(m), shrunk(m);
    for (int i = 0; i < m; ++i) {
      mix[i] = lam * a[i] + (1.0 - lam) * b[i];
      shrunk[i] = a[i] * std::min(1.0, std::abs(rng.next()));
    }
    CHECK(holder::region_membership({frame, mix}));
    CHECK(holder::region_membership({frame, shrunk}));
  }
}

TEST_CASE("projection clause on sampled subsets") {
  // Dropping blocks from a member keeps the remaining weights eligible for the
  // sub-frame made of the remaining blocks.
  numint::NormalSource rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Frame frame = random_frame({1, 1, 1}, 2, rng);
    std::vector<double> c(3);
    do {
      for (int i = 0; i < 3; ++i) c[i] = std::abs(rng.next()) / 2.0;
    } while (!holder::region_membership({frame, c}));
    Frame sub;
    sub.blocks = {frame.blocks[0], frame.blocks[2]};
    CHECK(holder::region_membership({sub, {c[0], c[2]}}));
  }
}

TEST_CASE("boundary_scale examples") {
  CHECK(holder::boundary_scale(Frame::bivariate(0.5), {1.0, 1.0}) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-10));
  CHECK(holder::boundary_scale(Frame::bivariate(0.0), {1.0, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(holder::boundary_scale(Frame::bivariate(0.5), {1.0, 0.0}) ==
        doctest::Approx(1.0).epsilon(1e-10));
  // The rescaled direction lands on the boundary.
  const Frame frame = Frame::bivariate(0.3);
  const double s = holder::boundary_scale(frame, {0.8, 0.4});
  CHECK(holder::region_norm(frame, {s * 0.8, s * 0.4}) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(holder::boundary_scale(frame, {0.0, 0.0}), Error);
}

TEST_CASE("equality_witness reproduces the closed-form equalities") {
  GaussianInstance inst = bivariate(0.5, 1.5, 1.5);
  auto witnesses = holder::equality_witness(inst);
  REQUIRE(witnesses.size() == 1);
  // f_i = e^{a x} with equal coefficients; both sides exp(1.5) after normalizing.
  const auto& tuple = witnesses[0];
  CHECK(tuple[0].linear(0) == doctest::Approx(tuple[1].linear(0)).epsilon(1e-9));
  VectorXd alpha(2);
  alpha << tuple[0].linear(0), tuple[1].linear(0);
  const double lhs = gauss::product_expectation_closed(inst, tuple);
  CHECK(lhs == doctest::Approx(gauss::holder_rhs_exponential(inst, alpha)).epsilon(1e-12));

  inst = bivariate(0.5, 0.5, 0.5);
  witnesses = holder::equality_witness(inst);
  REQUIRE(witnesses.size() == 1);
  CHECK(witnesses[0][0].linear(0) == doctest::Approx(-witnesses[0][1].linear(0)).epsilon(1e-9));

  // Strict comparison has no witness.
  inst = bivariate(0.5, 3.0, 3.0);
  CHECK_THROWS_AS(holder::equality_witness(inst), Error);
}

TEST_CASE("decompose_identity reconstructions") {
  Frame coords;
  coords.blocks = {Eigen::MatrixXd::Identity(2, 2).topRows(1),
                   Eigen::MatrixXd::Identity(2, 2).bottomRows(1)};
  const auto decomp = holder::decompose_identity({coords, {0.5, 0.5}});
  Eigen::MatrixXd recon = decomp.reconstruct(coords);
  CHECK((recon - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  // lambda_1 = 1/2, so the total weight on each projection doubles to 1.
  double total0 = decomp.scaled_frame_weights[0];
  for (const auto& term : decomp.extra_terms)
    if (term.B.rows() == 1 && std::abs(term.B(0, 0) - 1.0) < 1e-12) total0 += 1.0 / term.b;
  CHECK(total0 == doctest::Approx(1.0).epsilon(1e-12));

  // Geometric data: sum c_i U_i^T U_i = I already, no extra terms.
  const auto geo = holder::decompose_identity({coords, {1.0, 1.0}});
  CHECK(geo.extra_terms.empty());
  CHECK((geo.reconstruct(coords) - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);

  // Bivariate boundary point.
  const Frame frame = Frame::bivariate(0.5);
  const auto boundary = holder::decompose_identity({frame, {2.0 / 3.0, 2.0 / 3.0}});
  CHECK((boundary.reconstruct(frame) - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-8);
  for (const auto& term : boundary.extra_terms) CHECK(term.b > 0);

  CHECK_THROWS_AS(holder::decompose_identity({frame, {1.0, 1.0}}), Error);
}

TEST_CASE("decompose_identity on random members") {
  numint::NormalSource rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 2 + trial % 3;
    const Frame frame = random_frame(std::vector<int>(m, 1), 2, rng);
    std::vector<double> c(m);
    do {
      for (int i = 0; i < m; ++i) c[i] = std::abs(rng.next()) / 2.0;
    } while (!holder::region_membership({frame, c}));
    const auto decomp = holder::decompose_identity({frame, c});
    CHECK((decomp.reconstruct(frame) - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-8);
  }
}

TEST_CASE("geometric_condition_check directions and sampled consistency") {
  Frame coords;
  coords.blocks = {Eigen::MatrixXd::Identity(2, 2).topRows(1),
                   Eigen::MatrixXd::Identity(2, 2).bottomRows(1)};
  auto check = holder::geometric_condition_check(coords, {1.0, 1.0}, 200, 7);
  CHECK(check.le_holds);
  CHECK(check.ge_holds);
  CHECK(check.le_violations == 0);
  CHECK(check.ge_violations == 0);

  const Frame frame = Frame::bivariate(0.5);
  check = holder::geometric_condition_check(frame, {2.0 / 3.0, 2.0 / 3.0}, 500, 11);
  CHECK(check.le_holds);
  CHECK_FALSE(check.ge_holds);
  CHECK(check.le_violations == 0);

  check = holder::geometric_condition_check(frame, {2.0, 2.0}, 500, 13);
  CHECK_FALSE(check.le_holds);
  CHECK(check.ge_holds);
  CHECK(check.ge_violations == 0);
}

TEST_CASE("exponential family obeys the classified direction") {
  numint::NormalSource rng(47);
  int upper_count = 0, lower_count = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<int> sizes;
    int total = 0;
    while (total < 2 + trial % 5) {
      sizes.push_back(1 + static_cast<int>(std::abs(rng.next())) % 2);
      total += sizes.back();
    }
    GaussianInstance inst = random_instance(sizes, rng);
    const bool upper = trial % 2 == 0;
    set_direction(inst, upper, 0.1 * std::abs(rng.next()));
    const auto verdict = holder::classify(inst);
    if (upper) {
      REQUIRE(verdict.upper_holds);
      ++upper_count;
    } else {
      REQUIRE(verdict.lower_holds);
      ++lower_count;
    }
    for (int k = 0; k < 50; ++k) {
      VectorXd alpha(inst.T.dim());
      for (int i = 0; i < alpha.size(); ++i) alpha(i) = rng.next();
      alpha /= std::max(1.0, alpha.norm());
      const double lhs = gauss::exp_moment(inst.T, alpha);
      const double rhs = gauss::holder_rhs_exponential(inst, alpha);
      if (upper) {
        CHECK(lhs <= rhs * (1.0 + 1e-12));
      } else {
        CHECK(lhs >= rhs * (1.0 - 1e-12));
      }
    }
  }
  CHECK(upper_count == 250);
  CHECK(lower_count == 250);
}

TEST_CASE("necessity: violations are found when classification is Neither") {
  numint::NormalSource rng(53);
  int found = 0;
  int attempts = 0;
  while (found < 200 && attempts < 5000) {
    ++attempts;
    std::vector<int> sizes{1 + attempts % 2, 1, 1 + (attempts / 2) % 2};
    GaussianInstance inst = random_instance(sizes, rng);
    for (auto& p : inst.p) p = 0.3 + 2.7 * std::abs(std::tanh(rng.next()));
    if (!holder::classify(inst).neither()) continue;
    ++found;
    const auto up = holder::violation_witness(inst, true, 200, 1000 + attempts);
    const auto down = holder::violation_witness(inst, false, 200, 2000 + attempts);
    REQUIRE(up.has_value());
    REQUIRE(down.has_value());
    CHECK(gauss::exp_moment(inst.T, *up) >
          gauss::holder_rhs_exponential(inst, *up) * (1.0 + 1e-12));
    CHECK(gauss::exp_moment(inst.T, *down) <
          gauss::holder_rhs_exponential(inst, *down) * (1.0 - 1e-12));
  }
  CHECK(found == 200);
}

TEST_CASE("Monte Carlo spot check of the bivariate bound for bounded functions") {
  const GaussianInstance inst = bivariate(0.5, 1.5, 1.5);
  numint::McSpec mc;
  mc.samples = 400'000;
  mc.seed = 4242;
  const auto lhs = numint::mc_expect(
      make_fn(2, [](const VectorXd& x) {
        return 1.0 / ((1.0 + x(0) * x(0)) * (1.0 + x(1) * x(1)));
      }),
      inst.T, mc);

  // Right side via 1D quadrature of f^{1.5} under the standard Gaussian.
  numint::QuadratureSpec spec;
  spec.nodes_per_dim = 64;
  const double norm = numint::lp_norm(
      make_fn(1, [](const VectorXd& x) { return 1.0 / (1.0 + x(0) * x(0)); }), spec, 1.5);
  CHECK(lhs.value <= norm * norm + 4.0 * *lhs.std_error);
}
