#ifndef GHOLDER_HOLDER_HPP
#define GHOLDER_HOLDER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "gholder/gauss.hpp"
#include "gholder/symlin.hpp"

namespace gholder::holder {

/// Outcome of comparing T against P = diag(p_i T_ii).
struct CriterionVerdict {
  bool upper_holds = false;  // T <= P
  bool lower_holds = false;  // T >= P
  bool strict_upper = false;
  bool strict_lower = false;
  std::vector<VectorXd> kernel_basis;  // spans Ker(T - P)
  double min_eig_P_minus_T = 0.0;
  double min_eig_T_minus_P = 0.0;

  bool neither() const { return !upper_holds && !lower_holds; }
  const char* direction_name() const;
};

/// Frame of co-isometries U_i (n_i x n, U_i U_i^T = I); the stacked matrix U is N x n.
struct Frame {
  std::vector<symlin::RectMatrix> blocks;

  int count() const { return static_cast<int>(blocks.size()); }
  int ambient_dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks[0].cols()); }
  int total_rows() const;
  symlin::RectMatrix stacked() const;
  symlin::SymMatrix gram() const;  // U U^T
  void validate(double tol = 1e-9) const;

  /// Gram-factor a covariance with identity diagonal blocks into a frame.
  static Frame from_covariance(const symlin::SymMatrix& T, const std::vector<int>& block_sizes);
  /// The bivariate frame of [[1, t], [t, 1]] (rank 1 at |t| = 1).
  static Frame bivariate(double t);
};

struct ExponentRegionQuery {
  Frame frame;
  std::vector<double> c;  // c_i = 1/p_i, nonnegative

  void validate() const;
};

/// Decomposition of the identity: sum_i w_i U_i^T U_i + sum_j (1/b_j) B_j^T B_j = I_n.
struct IdentityDecomposition {
  std::vector<double> scaled_frame_weights;  // w_i, aligned with the frame blocks
  struct ExtraTerm {
    double b;  // weight enters as 1/b
    symlin::RectMatrix B;
  };
  std::vector<ExtraTerm> extra_terms;

  Eigen::MatrixXd reconstruct(const Frame& frame) const;
};

struct ConjugateReport {
  double det_P_minus_T = 0.0;
  double det_T = 0.0;
  bool det_identity_holds = false;  // det(P - T) == det(T) within 1e-10 relative
  bool upper = false;               // p1, p2 > 1
  bool lower = false;               // one exponent below 0, the other in (0, 1)
};

struct GeometricCheck {
  bool le_holds = false;  // U U^T <= diag(1/d_i)
  bool ge_holds = false;  // U U^T >= diag(1/d_i)
  int trials = 0;
  int le_violations = 0;  // sampled |sum d_i U_i^T xi_i|^2 <= sum d_i |xi_i|^2 failures
  int ge_violations = 0;
};

/// P = diag(p_1 T_11, ..., p_m T_mm).
symlin::SymMatrix build_P(const gauss::GaussianInstance& instance);

/// PSD comparison of T against P, with the kernel of T - P extracted from
/// eigenvectors below kernel_tol * max(1, ||T - P||_op).
CriterionVerdict classify(const gauss::GaussianInstance& instance,
                          double psd_tol = symlin::kDefaultPsdTol, double kernel_tol = 1e-8);

/// Conjugate-exponent recovery check on a non-degenerate scalar 2-block covariance:
/// reports det(P - T) = det(T) and which classical direction applies.
ConjugateReport holder_conjugate_check(const symlin::SymMatrix& T, double p1, double p2);

/// Strictly better exponents on the ray q_i = 1 + s (p_i - 1): the boundary solution
/// of det(Q - T) = 0, found by bisection. Requires det(T) > 0.
std::pair<double, double> improved_exponents(const symlin::SymMatrix& T, double p1, double p2);

bool region_membership(const ExponentRegionQuery& query);

/// The region gauge ||sum |c_i| U_i^T U_i||_op; membership is value <= 1.
double region_norm(const Frame& frame, const std::vector<double>& c);

/// Closed-form bivariate membership: (1/c1 - 1)(1/c2 - 1) >= t^2 inside [0,1]^2.
bool bivariate_region_contains(double t, double c1, double c2);

/// s* > 0 with region_norm(s* direction) = 1, by bisection.
double boundary_scale(const Frame& frame, const std::vector<double>& direction);

/// Exponential tuples achieving equality, one per kernel basis vector of T - P.
/// Each returned tuple is verified against the closed forms at rtol 1e-10.
std::vector<std::vector<gauss::QuadExpFunction>> equality_witness(
    const gauss::GaussianInstance& instance);

/// The eigen-decomposition construction behind eligibility: weights c_i on the frame
/// plus rank-one and rescaled-frame corrections, summing to I_n.
IdentityDecomposition decompose_identity(const ExponentRegionQuery& query);

/// Sampled quadratic test |sum d_i U_i^T xi_i|^2 vs sum d_i |xi_i|^2 against the
/// matrix comparison U U^T vs diag(1/d_i); the two must agree on every trial.
GeometricCheck geometric_condition_check(const Frame& frame, const std::vector<double>& d,
                                         int trials, std::uint64_t seed);

/// Searches for an exponential counterexample to the given direction of the product
/// inequality: eigenvectors of T - P first, then random directions.
std::optional<VectorXd> violation_witness(const gauss::GaussianInstance& instance,
                                          bool upper_direction, int max_candidates,
                                          std::uint64_t seed);

}  // namespace gholder::holder

#endif
