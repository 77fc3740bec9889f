#ifndef GHOLDER_SYMLIN_HPP
#define GHOLDER_SYMLIN_HPP

#include <vector>

#include "gholder/core.hpp"

namespace gholder::symlin {

/// Rectangular real matrix. Zero columns are legal (empty orthonormal complement).
using RectMatrix = Eigen::MatrixXd;

/// Dense real symmetric matrix. Construction symmetrizes via (M + M^T)/2, so only
/// logical symmetry is ever stored; asymmetric input beyond that is the caller's bug.
class SymMatrix {
 public:
  SymMatrix() : m_(Eigen::MatrixXd::Zero(1, 1)) {}
  explicit SymMatrix(const Eigen::MatrixXd& m);
  static SymMatrix identity(int dim) { return SymMatrix(Eigen::MatrixXd::Identity(dim, dim)); }
  static SymMatrix zero(int dim) { return SymMatrix(Eigen::MatrixXd::Zero(dim, dim)); }
  static SymMatrix diagonal(const VectorXd& d) {
    return SymMatrix(Eigen::MatrixXd(d.asDiagonal()));
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  SymMatrix block(int i, int j, int rows, int cols) const {
    return SymMatrix(Eigen::MatrixXd(m_.block(i, j, rows, cols)));
  }

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.m_ + b.m_);
  }
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.m_ - b.m_);
  }
  friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

 private:
  Eigen::MatrixXd m_;
};

struct EigDecomposition {
  VectorXd eigenvalues;   // sorted non-increasing
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matching order
};

enum class PsdStatus {
  PositiveDefinite,
  PositiveSemiDefinite,
  Indefinite,
  NegativeSemiDefinite,
  NegativeDefinite,
};

const char* psd_status_name(PsdStatus s);

struct PsdVerdict {
  PsdStatus status;
  double min_eigenvalue;
  double max_eigenvalue;
  double tolerance_used;

  bool is_psd() const {
    return status == PsdStatus::PositiveDefinite || status == PsdStatus::PositiveSemiDefinite;
  }
  bool is_pd() const { return status == PsdStatus::PositiveDefinite; }
};

inline constexpr double kDefaultPsdTol = 1e-10;
inline constexpr double kDefaultRankTol = 1e-10;

/// Eigendecomposition with eigenvalues sorted non-increasing.
EigDecomposition eig_sym(const SymMatrix& M);

/// Scale-aware sign classification: threshold tol * max(1, |lambda|_max).
PsdVerdict psd_classify(const SymMatrix& M, double tol = kDefaultPsdTol);

/// Symmetric PSD square root; eigenvalues within tolerance below zero are clamped.
SymMatrix sqrt_psd(const SymMatrix& M, double tol = kDefaultPsdTol);

/// Gram factor U (N x rank) with U U^T = T. Columns are scaled eigenvectors with the
/// first nonzero entry positive, so the output is deterministic.
RectMatrix factor_gram(const SymMatrix& T, double rank_tol = kDefaultRankTol);

/// For column-orthonormal M (N x n), returns W (N x (N-n)) with W^T W = I and
/// M M^T + W W^T = I_N.
RectMatrix orthonormal_complement(const RectMatrix& M);

/// True iff [[A, X^T], [X, B]] is PSD, decided through the Schur complement
/// B - X A^{-1} X^T. A must be positive definite.
bool schur_psd(const SymMatrix& A, const SymMatrix& B, const RectMatrix& X,
               double tol = kDefaultPsdTol);

/// Largest |eigenvalue|.
double op_norm(const SymMatrix& M);

}  // namespace gholder::symlin

#endif
