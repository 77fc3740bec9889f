#include "gholder/holder.hpp"

#include <algorithm>
#include <cmath>

#include "gholder/numint.hpp"

namespace gholder::holder {

const char* CriterionVerdict::direction_name() const {
  if (upper_holds && lower_holds) return "Both";
  if (upper_holds) return "Upper";
  if (lower_holds) return "Lower";
  return "Neither";
}

int Frame::total_rows() const {
  int n = 0;
  for (const auto& b : blocks) n += static_cast<int>(b.rows());
  return n;
}

symlin::RectMatrix Frame::stacked() const {
  const int N = total_rows();
  const int n = ambient_dim();
  symlin::RectMatrix U(N, n);
  int row = 0;
  for (const auto& b : blocks) {
    U.middleRows(row, b.rows()) = b;
    row += static_cast<int>(b.rows());
  }
  return U;
}

symlin::SymMatrix Frame::gram() const {
  const symlin::RectMatrix U = stacked();
  return symlin::SymMatrix(Eigen::MatrixXd(U * U.transpose()));
}

void Frame::validate(double tol) const {
  if (blocks.empty()) fail(ErrorCode::InvalidInput, "empty frame");
  const int n = ambient_dim();
  for (const auto& b : blocks) {
    if (b.cols() != n || b.rows() < 1 || b.rows() > n)
      fail(ErrorCode::InvalidInput, "frame block shape mismatch");
    const Eigen::MatrixXd g = b * b.transpose();
    if ((g - Eigen::MatrixXd::Identity(b.rows(), b.rows())).norm() > tol * b.rows())
      fail(ErrorCode::NotIsometry, "frame rows are not orthonormal");
  }
}

Frame Frame::from_covariance(const symlin::SymMatrix& T, const std::vector<int>& block_sizes) {
  const symlin::RectMatrix U = symlin::factor_gram(T);
  Frame frame;
  int row = 0;
  for (int ni : block_sizes) {
    frame.blocks.push_back(U.middleRows(row, ni));
    row += ni;
  }
  if (row != T.dim()) fail(ErrorCode::InvalidInput, "block sizes do not cover the covariance");
  frame.validate();
  return frame;
}

Frame Frame::bivariate(double t) {
  Eigen::MatrixXd T(2, 2);
  T << 1.0, t, t, 1.0;
  return from_covariance(symlin::SymMatrix(T), {1, 1});
}

void ExponentRegionQuery::validate() const {
  frame.validate();
  if (static_cast<int>(c.size()) != frame.count())
    fail(ErrorCode::InvalidInput, "one weight per frame block required");
  for (double ci : c)
    if (!(ci >= 0) || !std::isfinite(ci))
      fail(ErrorCode::InvalidInput, "weights must be nonnegative");
}

Eigen::MatrixXd IdentityDecomposition::reconstruct(const Frame& frame) const {
  const int n = frame.ambient_dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < frame.count(); ++i)
    acc += scaled_frame_weights[i] * frame.blocks[i].transpose() * frame.blocks[i];
  for (const auto& term : extra_terms) acc += (1.0 / term.b) * term.B.transpose() * term.B;
  return acc;
}

symlin::SymMatrix build_P(const gauss::GaussianInstance& instance) {
  instance.validate();
  const int N = instance.T.dim();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < instance.blocks.count(); ++i) {
    const int off = instance.blocks.offset(i);
    const int ni = instance.blocks.sizes[i];
    P.block(off, off, ni, ni) = instance.p[i] * instance.diag_block(i).mat();
  }
  return symlin::SymMatrix(P);
}

CriterionVerdict classify(const gauss::GaussianInstance& instance, double psd_tol,
                          double kernel_tol) {
  const symlin::SymMatrix P = build_P(instance);
  const symlin::SymMatrix diff(Eigen::MatrixXd(P.mat() - instance.T.mat()));

  CriterionVerdict v;
  const symlin::PsdVerdict up = symlin::psd_classify(diff, psd_tol);
  const symlin::PsdVerdict down = symlin::psd_classify(symlin::SymMatrix(-diff.mat()), psd_tol);
  v.upper_holds = up.is_psd();
  v.strict_upper = up.is_pd();
  v.lower_holds = down.is_psd();
  v.strict_lower = down.is_pd();
  v.min_eig_P_minus_T = up.min_eigenvalue;
  v.min_eig_T_minus_P = down.min_eigenvalue;

  const symlin::EigDecomposition eig = symlin::eig_sym(diff);
  const double scale = std::max(1.0, symlin::op_norm(diff));
  for (int i = 0; i < diff.dim(); ++i)
    if (std::abs(eig.eigenvalues(i)) <= kernel_tol * scale)
      v.kernel_basis.push_back(eig.eigenvectors.col(i));
  return v;
}

ConjugateReport holder_conjugate_check(const symlin::SymMatrix& T, double p1, double p2) {
  if (T.dim() != 2) fail(ErrorCode::InvalidInput, "scalar 2-block covariance required");
  if (p1 == 0 || p2 == 0 || std::abs(1.0 / p1 + 1.0 / p2 - 1.0) > 1e-12)
    fail(ErrorCode::NotConjugate, "exponents are not conjugate");
  if (p1 == 1.0 || p2 == 1.0) fail(ErrorCode::NotConjugate, "exponent 1 is degenerate here");

  ConjugateReport rep;
  Eigen::MatrixXd PmT(2, 2);
  PmT << (p1 - 1.0) * T(0, 0), -T(0, 1), -T(0, 1), (p2 - 1.0) * T(1, 1);
  rep.det_P_minus_T = PmT.determinant();
  rep.det_T = T.mat().determinant();
  rep.det_identity_holds = approx_eq(rep.det_P_minus_T, rep.det_T, 1e-10, 1e-14);
  rep.upper = p1 > 1.0 && p2 > 1.0;
  rep.lower = std::min(p1, p2) < 0.0 && std::max(p1, p2) < 1.0;
  return rep;
}

std::pair<double, double> improved_exponents(const symlin::SymMatrix& T, double p1, double p2) {
  if (T.dim() != 2) fail(ErrorCode::InvalidInput, "scalar 2-block covariance required");
  if (std::abs(1.0 / p1 + 1.0 / p2 - 1.0) > 1e-12)
    fail(ErrorCode::NotConjugate, "exponents are not conjugate");
  const bool upper = p1 > 1.0 && p2 > 1.0;
  const bool lower = p1 < 1.0 && p2 < 1.0;
  if (!upper && !lower) fail(ErrorCode::NotConjugate, "exponents must be on one side of 1");
  if (!(T.mat().determinant() > 0))
    fail(ErrorCode::Degenerate, "no improvement exists for a singular covariance");

  // det(Q(s) - T) = s^2 (p1-1)(p2-1) T11 T22 - T12^2, increasing in s on [0, 1].
  const auto residual = [&](double s) {
    return s * s * (p1 - 1.0) * (p2 - 1.0) * T(0, 0) * T(1, 1) - T(0, 1) * T(0, 1);
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0 ? lo : hi) = mid;
  }
  const double s = residual(0.0) == 0.0 ? 0.0 : 0.5 * (lo + hi);
  return {1.0 + s * (p1 - 1.0), 1.0 + s * (p2 - 1.0)};
}

bool region_membership(const ExponentRegionQuery& query) {
  query.validate();
  const symlin::SymMatrix gram = query.frame.gram();
  const int N = gram.dim();
  VectorXd sqrt_c(N);
  int row = 0;
  for (int i = 0; i < query.frame.count(); ++i) {
    const int ni = static_cast<int>(query.frame.blocks[i].rows());
    sqrt_c.segment(row, ni).setConstant(std::sqrt(query.c[i]));
    row += ni;
  }
  const Eigen::MatrixXd scaled =
      sqrt_c.asDiagonal() * gram.mat() * sqrt_c.asDiagonal();
  return symlin::op_norm(symlin::SymMatrix(scaled)) <= 1.0 + 1e-10;
}

double region_norm(const Frame& frame, const std::vector<double>& c) {
  frame.validate();
  if (static_cast<int>(c.size()) != frame.count())
    fail(ErrorCode::InvalidInput, "one weight per frame block required");
  const int n = frame.ambient_dim();
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < frame.count(); ++i)
    acc += std::abs(c[i]) * frame.blocks[i].transpose() * frame.blocks[i];
  return symlin::op_norm(symlin::SymMatrix(acc));
}

bool bivariate_region_contains(double t, double c1, double c2) {
  if (c1 < 0 || c2 < 0 || c1 > 1 || c2 > 1 || t < 0 || t > 1)
    fail(ErrorCode::InvalidInput, "expected t, c1, c2 in [0, 1]");
  return (1.0 - c1) * (1.0 - c2) + 1e-15 >= t * t * c1 * c2;
}

double boundary_scale(const Frame& frame, const std::vector<double>& direction) {
  bool nonzero = false;
  for (double d : direction) {
    if (d < 0) fail(ErrorCode::InvalidInput, "direction must be nonnegative");
    nonzero = nonzero || d > 0;
  }
  if (!nonzero) fail(ErrorCode::InvalidInput, "direction must be nonzero");

  const auto norm_at = [&](double s) {
    std::vector<double> scaled(direction.size());
    for (size_t i = 0; i < direction.size(); ++i) scaled[i] = s * direction[i];
    return region_norm(frame, scaled);
  };
  double hi = 1.0;
  while (norm_at(hi) < 1.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (norm_at(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<std::vector<gauss::QuadExpFunction>> equality_witness(
    const gauss::GaussianInstance& instance) {
  const CriterionVerdict verdict = classify(instance);
  if (verdict.kernel_basis.empty())
    fail(ErrorCode::NoWitness, "T - P has trivial kernel");

  std::vector<std::vector<gauss::QuadExpFunction>> witnesses;
  for (const VectorXd& alpha : verdict.kernel_basis) {
    std::vector<gauss::QuadExpFunction> tuple;
    for (int i = 0; i < instance.blocks.count(); ++i) {
      const int off = instance.blocks.offset(i);
      const int ni = instance.blocks.sizes[i];
      tuple.push_back(gauss::QuadExpFunction::exp_linear(alpha.segment(off, ni)));
    }
    const double lhs = gauss::product_expectation_closed(instance, tuple);
    const double rhs = gauss::holder_rhs_exponential(instance, alpha);
    if (!approx_eq(lhs, rhs, 1e-10))
      fail(ErrorCode::NoWitness, "kernel vector fails the closed-form equality check");
    witnesses.push_back(std::move(tuple));
  }
  return witnesses;
}

IdentityDecomposition decompose_identity(const ExponentRegionQuery& query) {
  if (!region_membership(query)) fail(ErrorCode::NotEligible, "weights outside the region");
  const Frame& frame = query.frame;
  const int n = frame.ambient_dim();

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < frame.count(); ++i)
    A += query.c[i] * frame.blocks[i].transpose() * frame.blocks[i];
  const symlin::EigDecomposition eig = symlin::eig_sym(symlin::SymMatrix(A));
  const double lambda1 = eig.eigenvalues(0);

  IdentityDecomposition out;
  constexpr double kDrop = 1e-12;
  if (lambda1 < 1e-14) {
    // All weights vanish; the identity is carried by a single orthonormal term.
    out.scaled_frame_weights.assign(frame.count(), 0.0);
    out.extra_terms.push_back({1.0, Eigen::MatrixXd::Identity(n, n)});
    return out;
  }

  out.scaled_frame_weights = query.c;
  for (int i = 1; i < n; ++i) {
    const double w = 1.0 - eig.eigenvalues(i) / lambda1;
    if (w < kDrop) continue;
    out.extra_terms.push_back({1.0 / w, Eigen::MatrixXd(eig.eigenvectors.col(i).transpose())});
  }
  const double correction = 1.0 / lambda1 - 1.0;
  if (correction > kDrop) {
    for (int i = 0; i < frame.count(); ++i) {
      const double w = query.c[i] * correction;
      if (w < kDrop) continue;
      out.extra_terms.push_back({1.0 / w, frame.blocks[i]});
    }
  }
  return out;
}

GeometricCheck geometric_condition_check(const Frame& frame, const std::vector<double>& d,
                                         int trials, std::uint64_t seed) {
  frame.validate();
  if (static_cast<int>(d.size()) != frame.count())
    fail(ErrorCode::InvalidInput, "one weight per frame block required");
  for (double di : d)
    if (!(di > 0)) fail(ErrorCode::InvalidInput, "weights must be positive");

  const symlin::SymMatrix gram = frame.gram();
  const int N = gram.dim();
  VectorXd dinv(N);
  int row = 0;
  for (int i = 0; i < frame.count(); ++i) {
    const int ni = static_cast<int>(frame.blocks[i].rows());
    dinv.segment(row, ni).setConstant(1.0 / d[i]);
    row += ni;
  }
  GeometricCheck check;
  check.le_holds =
      symlin::psd_classify(symlin::SymMatrix(Eigen::MatrixXd(dinv.asDiagonal()) - gram.mat()))
          .is_psd();
  check.ge_holds =
      symlin::psd_classify(symlin::SymMatrix(gram.mat() - Eigen::MatrixXd(dinv.asDiagonal())))
          .is_psd();
  check.trials = trials;

  numint::NormalSource rng(seed);
  const int n = frame.ambient_dim();
  for (int t = 0; t < trials; ++t) {
    VectorXd combined = VectorXd::Zero(n);
    double rhs = 0.0;
    for (int i = 0; i < frame.count(); ++i) {
      VectorXd xi(frame.blocks[i].rows());
      for (int k = 0; k < xi.size(); ++k) xi(k) = rng.next();
      combined += d[i] * frame.blocks[i].transpose() * xi;
      rhs += d[i] * xi.squaredNorm();
    }
    const double lhs = combined.squaredNorm();
    const double slack = 1e-9 * std::max(1.0, std::max(lhs, rhs));
    if (check.le_holds && lhs > rhs + slack) ++check.le_violations;
    if (check.ge_holds && lhs < rhs - slack) ++check.ge_violations;
  }
  return check;
}

std::optional<VectorXd> violation_witness(const gauss::GaussianInstance& instance,
                                          bool upper_direction, int max_candidates,
                                          std::uint64_t seed) {
  const symlin::SymMatrix P = build_P(instance);
  const symlin::SymMatrix diff(Eigen::MatrixXd(instance.T.mat() - P.mat()));
  const symlin::EigDecomposition eig = symlin::eig_sym(diff);
  const int N = diff.dim();

  const auto violates = [&](const VectorXd& alpha) {
    const double lhs = gauss::exp_moment(instance.T, alpha);
    const double rhs = gauss::holder_rhs_exponential(instance, alpha);
    return upper_direction ? lhs > rhs * (1.0 + 1e-12) : lhs < rhs * (1.0 - 1e-12);
  };

  int used = 0;
  // Eigenvectors of T - P are the sharpest candidates: <(T-P)a, a> is extremal there.
  for (int i = 0; i < N && used < max_candidates; ++i, ++used) {
    const VectorXd alpha = eig.eigenvectors.col(upper_direction ? i : N - 1 - i);
    if (violates(alpha)) return alpha;
  }
  numint::NormalSource rng(seed);
  while (used < max_candidates) {
    VectorXd alpha(N);
    for (int k = 0; k < N; ++k) alpha(k) = rng.next();
    alpha.normalize();
    ++used;
    if (violates(alpha)) return alpha;
  }
  return std::nullopt;
}

}  // namespace gholder::holder
