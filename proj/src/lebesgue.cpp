#include "gholder/lebesgue.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "gholder/numint.hpp"

namespace gholder::lebesgue {

namespace {

double log_det_pd(const symlin::SymMatrix& M, ErrorCode on_singular, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(M.mat());
  const double lmax = eig.eigenvalues().maxCoeff();
  double acc = 0.0;
  for (int i = 0; i < M.dim(); ++i) {
    const double v = eig.eigenvalues()(i);
    if (v <= 1e-12 * std::max(1.0, lmax)) fail(on_singular, what);
    acc += std::log(v);
  }
  return acc;
}

}  // namespace

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Upper: return "Upper";
    case Direction::Lower: return "Lower";
    case Direction::Both: return "Both";
    case Direction::Neither: return "Neither";
  }
  return "?";
}

symlin::SymMatrix FrameInstance::block(int i) const {
  return symlin::SymMatrix(Eigen::MatrixXd(U_list[i] * B.mat() * U_list[i].transpose()));
}

void FrameInstance::validate(double tol) const {
  if (U_list.empty()) fail(ErrorCode::InvalidInput, "need at least one map");
  if (p.size() != U_list.size()) fail(ErrorCode::InvalidInput, "one exponent per map required");
  const int n = ambient_dim();
  if (!symlin::psd_classify(B).is_pd())
    fail(ErrorCode::InvalidInput, "base matrix must be positive definite");
  for (const auto& U : U_list) {
    if (U.cols() != n || U.rows() < 1 || U.rows() > n)
      fail(ErrorCode::InvalidInput, "map shape mismatch");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(U);
    if (svd.singularValues().minCoeff() <= tol * svd.singularValues().maxCoeff())
      fail(ErrorCode::InvalidInput, "maps must have full row rank");
  }
}

void YoungTriple::validate() const {
  if (!(p > 0) || !(q > 0) || !(r > 0)) fail(ErrorCode::NotConjugate, "exponents must be positive");
  if (std::abs(1.0 / p + 1.0 / q - 1.0 - 1.0 / r) > 1e-12)
    fail(ErrorCode::NotConjugate, "1/p + 1/q = 1 + 1/r fails");
}

bool homogeneity_check(const FrameInstance& instance) {
  instance.validate();
  double sum = 0.0;
  for (int i = 0; i < instance.count(); ++i) {
    if (instance.p[i] == 0) fail(ErrorCode::InvalidExponent, "zero exponent");
    sum += instance.U_list[i].rows() / instance.p[i];
  }
  return std::abs(sum - instance.ambient_dim()) <= 1e-10;
}

namespace {

Eigen::MatrixXd stacked(const FrameInstance& instance) {
  int N = 0;
  for (const auto& U : instance.U_list) N += static_cast<int>(U.rows());
  Eigen::MatrixXd out(N, instance.ambient_dim());
  int row = 0;
  for (const auto& U : instance.U_list) {
    out.middleRows(row, U.rows()) = U;
    row += static_cast<int>(U.rows());
  }
  return out;
}

}  // namespace

Direction condition_check(const FrameInstance& instance, double tol) {
  instance.validate();
  const Eigen::MatrixXd U = stacked(instance);
  const Eigen::MatrixXd M = U * instance.B.mat() * U.transpose();
  Eigen::MatrixXd PD = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  int row = 0;
  for (int i = 0; i < instance.count(); ++i) {
    const int ni = static_cast<int>(instance.U_list[i].rows());
    PD.block(row, row, ni, ni) = instance.p[i] * instance.block(i).mat();
    row += ni;
  }
  const bool upper = symlin::psd_classify(symlin::SymMatrix(PD - M), tol).is_psd();
  const bool lower = symlin::psd_classify(symlin::SymMatrix(M - PD), tol).is_psd();
  if (upper && lower) return Direction::Both;
  if (upper) return Direction::Upper;
  if (lower) return Direction::Lower;
  return Direction::Neither;
}

double bl_constant(const FrameInstance& instance) {
  instance.validate();
  double log_c = log_det_pd(instance.B, ErrorCode::Degenerate, "base matrix is singular");
  for (int i = 0; i < instance.count(); ++i)
    log_c -= log_det_pd(instance.block(i), ErrorCode::Degenerate, "singular block U_i B U_i^T") /
             instance.p[i];
  return std::exp(0.5 * log_c);
}

std::vector<gauss::QuadExpFunction> extremizers_upper(const FrameInstance& instance) {
  if (condition_check(instance) != Direction::Upper && condition_check(instance) != Direction::Both)
    fail(ErrorCode::NotApplicable, "upper condition does not hold");
  std::vector<gauss::QuadExpFunction> out;
  for (int i = 0; i < instance.count(); ++i) {
    const int ni = static_cast<int>(instance.U_list[i].rows());
    gauss::QuadExpFunction f;
    f.dim = ni;
    f.scale = 1.0;
    f.linear = VectorXd::Zero(ni);
    // exp(-p^{-1} (x, B_i^{-1} x)) written with the quad field as (2/p) B_i^{-1}.
    f.quad = symlin::SymMatrix(
        Eigen::MatrixXd((2.0 / instance.p[i]) * instance.block(i).mat().inverse()));
    out.push_back(std::move(f));
  }
  return out;
}

Lemma4Report lemma4_equivalences(const FrameInstance& instance, double tol) {
  instance.validate();
  Lemma4Report rep;

  double hom = 0.0;
  for (int i = 0; i < instance.count(); ++i) hom += instance.U_list[i].rows() / instance.p[i];
  rep.homogeneity_residual = std::abs(hom - instance.ambient_dim());

  const Eigen::MatrixXd U = stacked(instance);
  const Eigen::MatrixXd M = U * instance.B.mat() * U.transpose();
  Eigen::MatrixXd PD = Eigen::MatrixXd::Zero(M.rows(), M.cols());
  int row = 0;
  for (int i = 0; i < instance.count(); ++i) {
    const int ni = static_cast<int>(instance.U_list[i].rows());
    PD.block(row, row, ni, ni) = instance.p[i] * instance.block(i).mat();
    row += ni;
  }
  const symlin::PsdVerdict up = symlin::psd_classify(symlin::SymMatrix(PD - M));
  rep.psd_margin = up.min_eigenvalue;
  rep.via_condition = rep.homogeneity_residual <= 1e-10 && up.is_psd();

  const Eigen::MatrixXd Binv = instance.B.mat().inverse();
  const double scale = Binv.norm();

  const Eigen::MatrixXd via_inv = U.transpose() * PD.inverse() * U;
  rep.inverse_residual = (via_inv - Binv).norm() / scale;
  rep.via_inverse_identity = rep.inverse_residual <= tol;

  Eigen::MatrixXd via_sum = Eigen::MatrixXd::Zero(instance.ambient_dim(), instance.ambient_dim());
  for (int i = 0; i < instance.count(); ++i)
    via_sum += (1.0 / instance.p[i]) * instance.U_list[i].transpose() *
               instance.block(i).mat().inverse() * instance.U_list[i];
  rep.block_sum_residual = (via_sum - Binv).norm() / scale;
  rep.via_block_sum = rep.block_sum_residual <= tol;

  rep.consistent = rep.via_condition == rep.via_inverse_identity &&
                   rep.via_inverse_identity == rep.via_block_sum;
  return rep;
}

double young_sharp_constant(const YoungTriple& triple, int n) {
  triple.validate();
  // C_u^2 = |u|^{1/u} / |u'|^{1/u'}; the u = 1 limit is 1.
  const auto log_cu2 = [](double u) {
    if (std::abs(u - 1.0) < 1e-12) return 0.0;
    const double uc = u / (u - 1.0);
    return std::log(std::abs(u)) / u - std::log(std::abs(uc)) / uc;
  };
  const double log_c =
      0.5 * (log_cu2(triple.p) + log_cu2(triple.q) - log_cu2(triple.r));
  return std::exp(n * log_c);
}

YoungData young_setup(const YoungTriple& triple, int n) {
  triple.validate();
  if (n < 1) fail(ErrorCode::InvalidInput, "dimension must be positive");
  if (std::abs(triple.r - 1.0) < 1e-12)
    fail(ErrorCode::Degenerate, "r = 1 collapses the construction");
  const double rc = triple.r / (triple.r - 1.0);  // r', negative for r < 1
  const double c2 = 1.0 / triple.q;
  const double c3 = 1.0 / std::abs(rc);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd O = Eigen::MatrixXd::Zero(n, n);
  std::vector<symlin::RectMatrix> U(3, symlin::RectMatrix(n, 2 * n));
  U[0] << I, -I;
  U[1] << O, I;
  U[2] << I, O;

  Eigen::MatrixXd B1(2 * n, 2 * n), B2(2 * n, 2 * n);
  B1 << c3 * (1 - c3) * I, (1 - c2) * (1 - c3) * I, (1 - c2) * (1 - c3) * I, c2 * (1 - c2) * I;
  B2 << c3 * (1 + c3) * I, (c2 - 1) * (1 + c3) * I, (c2 - 1) * (1 + c3) * I, c2 * (c2 - 1) * I;

  YoungData data;
  data.constant = young_sharp_constant(triple, n);
  const std::vector<double> exponents = {triple.p, triple.q, rc};
  if (triple.p > 1 && triple.q > 1 && triple.r > 1) {
    data.upper = FrameInstance{U, symlin::SymMatrix(B1), exponents};
    data.upper.validate();
    if (!approx_eq(bl_constant(data.upper), data.constant, 1e-9))
      fail(ErrorCode::Degenerate, "determinant constant disagrees with the closed form");
  }
  if (triple.p < 1 && triple.q < 1 && triple.r < 1) {
    data.lower = FrameInstance{U, symlin::SymMatrix(B2), exponents};
    data.lower.validate();
    if (!approx_eq(bl_constant(data.lower), data.constant, 1e-9))
      fail(ErrorCode::Degenerate, "determinant constant disagrees with the closed form");
  }
  if (data.upper.U_list.empty() && data.lower.U_list.empty())
    fail(ErrorCode::Degenerate, "triple is on neither side of 1");
  return data;
}

namespace {

NumericReport assemble_report(const FrameInstance& instance, double lhs, double rhs,
                              double constant, double rtol) {
  NumericReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.constant = constant;
  rep.direction = condition_check(instance);
  if (!std::isfinite(lhs) || !std::isfinite(rhs) || rhs == 0.0) {
    rep.inconclusive = true;
    return rep;
  }
  rep.ratio = lhs / rhs;
  switch (rep.direction) {
    case Direction::Upper: rep.pass = rep.ratio <= 1.0 + rtol; break;
    case Direction::Lower: rep.pass = rep.ratio >= 1.0 - rtol; break;
    case Direction::Both: rep.pass = std::abs(rep.ratio - 1.0) <= rtol; break;
    case Direction::Neither: rep.pass = true; break;  // nothing asserted
  }
  return rep;
}

}  // namespace

NumericReport verify_lebesgue_numeric(const FrameInstance& instance,
                                      const std::vector<NumericFn>& fs, const QuadOptions& opts,
                                      double rtol) {
  instance.validate();
  const int n = instance.ambient_dim();
  if (n > 3) fail(ErrorCode::InvalidInput, "quadrature is capped at ambient dimension 3");
  if (static_cast<int>(fs.size()) != instance.count())
    fail(ErrorCode::InvalidInput, "one integrand per map required");

  const auto box = [&](int dims) {
    numint::QuadratureSpec spec;
    spec.nodes_per_dim = opts.nodes_per_dim;
    spec.dims = dims;
    spec.weight = numint::LebesgueBox{VectorXd::Constant(dims, -opts.box_halfwidth),
                                      VectorXd::Constant(dims, opts.box_halfwidth)};
    return spec;
  };

  NumericFn product = make_fn(n, [&](const VectorXd& x) {
    double acc = 1.0;
    for (int i = 0; i < instance.count(); ++i) acc *= fs[i](instance.U_list[i] * x);
    return acc;
  });
  const double lhs = numint::integrate(product, box(n)).value;

  const double constant = bl_constant(instance);
  double rhs = constant;
  for (int i = 0; i < instance.count(); ++i) {
    const int ni = static_cast<int>(instance.U_list[i].rows());
    rhs = ext_mul(rhs, numint::lp_norm(fs[i], box(ni), instance.p[i]));
  }
  return assemble_report(instance, lhs, rhs, constant, rtol);
}

NumericReport verify_lebesgue_closed(const FrameInstance& instance,
                                     const std::vector<gauss::QuadExpFunction>& fs, double rtol) {
  instance.validate();
  if (static_cast<int>(fs.size()) != instance.count())
    fail(ErrorCode::InvalidInput, "one function per map required");
  const gauss::QuadExpFunction product = gauss::compose_pullback(fs, instance.U_list);
  const double lhs = gauss::lebesgue_integral(product);
  const double constant = bl_constant(instance);
  double rhs = constant;
  for (int i = 0; i < instance.count(); ++i)
    rhs = ext_mul(rhs, gauss::lebesgue_lp_norm(fs[i], instance.p[i]));
  return assemble_report(instance, lhs, rhs, constant, rtol);
}

}  // namespace gholder::lebesgue
