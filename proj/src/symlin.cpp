#include "gholder/symlin.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>

namespace gholder::symlin {

const char* psd_status_name(PsdStatus s) {
  switch (s) {
    case PsdStatus::PositiveDefinite: return "PositiveDefinite";
    case PsdStatus::PositiveSemiDefinite: return "PositiveSemiDefinite";
    case PsdStatus::Indefinite: return "Indefinite";
    case PsdStatus::NegativeSemiDefinite: return "NegativeSemiDefinite";
    case PsdStatus::NegativeDefinite: return "NegativeDefinite";
  }
  return "?";
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) fail(ErrorCode::InvalidInput, "matrix must be square");
  if (!m.allFinite()) fail(ErrorCode::InvalidInput, "matrix has non-finite entries");
  m_ = 0.5 * (m + m.transpose());
}

EigDecomposition eig_sym(const SymMatrix& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M.mat());
  if (solver.info() != Eigen::Success) fail(ErrorCode::InvalidInput, "eigensolver failed");
  // Eigen sorts ascending; flip to non-increasing.
  const int n = M.dim();
  EigDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  return out;
}

PsdVerdict psd_classify(const SymMatrix& M, double tol) {
  if (tol < 0) fail(ErrorCode::InvalidInput, "tolerance must be nonnegative");
  const EigDecomposition eig = eig_sym(M);
  const double lmax = eig.eigenvalues(0);
  const double lmin = eig.eigenvalues(M.dim() - 1);
  const double scale = std::max(std::abs(lmax), std::abs(lmin));
  const double thr = tol * std::max(1.0, scale);

  PsdVerdict v;
  v.min_eigenvalue = lmin;
  v.max_eigenvalue = lmax;
  v.tolerance_used = thr;
  if (lmin > thr) {
    v.status = PsdStatus::PositiveDefinite;
  } else if (lmin >= -thr) {
    v.status = PsdStatus::PositiveSemiDefinite;
  } else if (lmax < -thr) {
    v.status = PsdStatus::NegativeDefinite;
  } else if (lmax <= thr) {
    v.status = PsdStatus::NegativeSemiDefinite;
  } else {
    v.status = PsdStatus::Indefinite;
  }
  return v;
}

SymMatrix sqrt_psd(const SymMatrix& M, double tol) {
  const PsdVerdict v = psd_classify(M, tol);
  if (!v.is_psd()) fail(ErrorCode::NotPsd, "square root requires a PSD matrix");
  const EigDecomposition eig = eig_sym(M);
  VectorXd roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.transpose());
}

RectMatrix factor_gram(const SymMatrix& T, double rank_tol) {
  const PsdVerdict v = psd_classify(T, rank_tol);
  if (!v.is_psd()) fail(ErrorCode::NotPsd, "Gram factorization requires a PSD matrix");
  const EigDecomposition eig = eig_sym(T);
  const double lmax = std::max(eig.eigenvalues(0), 0.0);
  int rank = 0;
  while (rank < T.dim() && eig.eigenvalues(rank) > rank_tol * std::max(1e-300, lmax)) ++rank;
  if (rank == 0) return RectMatrix::Zero(T.dim(), 0);

  RectMatrix U(T.dim(), rank);
  for (int j = 0; j < rank; ++j) {
    VectorXd col = std::sqrt(eig.eigenvalues(j)) * eig.eigenvectors.col(j);
    // Deterministic sign: first entry of nontrivial magnitude positive.
    double lead = 0.0;
    for (int i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-12 * col.norm()) {
        lead = col(i);
        break;
      }
    }
    U.col(j) = (lead < 0) ? VectorXd(-col) : col;
  }
  return U;
}

RectMatrix orthonormal_complement(const RectMatrix& M) {
  const int N = static_cast<int>(M.rows());
  const int n = static_cast<int>(M.cols());
  if (n > N) fail(ErrorCode::NotIsometry, "more columns than rows");
  if (n > 0) {
    const Eigen::MatrixXd gram = M.transpose() * M;
    if ((gram - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-9 * std::sqrt(double(n)))
      fail(ErrorCode::NotIsometry, "columns are not orthonormal");
  }
  if (n == N) return RectMatrix::Zero(N, 0);

  // Null space of M^T, via the trailing eigenvectors of M M^T.
  SymMatrix proj(Eigen::MatrixXd(M * M.transpose()));
  const EigDecomposition eig = eig_sym(proj);
  RectMatrix W(N, N - n);
  for (int j = 0; j < N - n; ++j) W.col(j) = eig.eigenvectors.col(N - 1 - j);
  return W;
}

bool schur_psd(const SymMatrix& A, const SymMatrix& B, const RectMatrix& X, double tol) {
  if (X.cols() != A.dim() || X.rows() != B.dim())
    fail(ErrorCode::InvalidInput, "block shapes do not match");
  const PsdVerdict va = psd_classify(A, tol);
  if (!va.is_pd()) fail(ErrorCode::SingularBlock, "pivot block must be positive definite");
  const Eigen::MatrixXd complement =
      B.mat() - X * A.mat().llt().solve(Eigen::MatrixXd(X.transpose()));
  return psd_classify(SymMatrix(complement), tol).is_psd();
}

double op_norm(const SymMatrix& M) {
  const EigDecomposition eig = eig_sym(M);
  return std::max(std::abs(eig.eigenvalues(0)), std::abs(eig.eigenvalues(M.dim() - 1)));
}

}  // namespace gholder::symlin
