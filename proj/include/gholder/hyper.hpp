#ifndef GHOLDER_HYPER_HPP
#define GHOLDER_HYPER_HPP

#include <vector>

#include "gholder/core.hpp"
#include "gholder/holder.hpp"

namespace gholder::hyper {

struct OuParams {
  double t = 0.0;  // semigroup time, t >= 0
  int dim = 1;
};

enum class Direction { Forward, Reverse };

struct HyperQuery {
  double p = 2.0;
  double q = 2.0;
  double t = 0.0;
  Direction direction = Direction::Forward;

  void validate() const;
};

enum class NumericVerdict { Pass, Fail, Inconclusive };

struct HyperNumericReport {
  double semigroup_norm = 0.0;  // ||P_t f||_q
  double input_norm = 0.0;      // ||f||_p
  NumericVerdict verdict = NumericVerdict::Inconclusive;
  double mehler_direct = 0.0;     // E g(X) f(Y) over the correlated pair
  double mehler_semigroup = 0.0;  // E g(X) P_t f(X)
  bool mehler_consistent = false;
};

struct MonotonicityReport {
  std::vector<double> times;
  std::vector<double> values;  // a(t) on the grid
  bool matrix_le = false;      // U U^T <= diag(1/d_i)
  bool matrix_ge = false;
  bool nondecreasing = false;
  bool nonincreasing = false;
  bool pass = false;  // observed monotonicity matches the matrix comparison
};

/// Ornstein-Uhlenbeck smoothing P_t f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) Y)
/// by Gauss-Hermite quadrature; exact on polynomials of degree < 2 * quad_nodes.
double ou_apply(const NumericFn& f, const OuParams& params, const VectorXd& x, int quad_nodes);

/// Closed-form time condition: (p-1)/(q-1) >= e^{-2t} forward,
/// (1-p)/(1-q) >= e^{-2t} reverse.
bool hyper_condition(const HyperQuery& query);

/// The same condition decided through the block-covariance comparison
/// T = [[I, e^{-t} I], [e^{-t} I, I]] vs diag(q' I, p I) in dimension 2n.
bool hyper_condition_matrix(const HyperQuery& query, int n = 1,
                            double psd_tol = symlin::kDefaultPsdTol);

/// Quadrature check of ||P_t f||_q vs ||f||_p plus the correlated-pair identity
/// E f(Y) g(X) = E P_t f(X) g(X) with g = f.
HyperNumericReport verify_hyper_numeric(const NumericFn& f, const HyperQuery& query,
                                        int quad_nodes = 48);

/// a(t) = int prod_i (P_t f_i(U_i x))^{d_i} dgamma_n on a time grid; the monotone
/// direction must match the matrix comparison. Ambient dimension capped at 2.
MonotonicityReport ou_product_monotonicity(const holder::Frame& frame,
                                           const std::vector<double>& d,
                                           const std::vector<NumericFn>& fs,
                                           const std::vector<double>& t_grid,
                                           int quad_nodes = 32, double rtol = 1e-6);

}  // namespace gholder::hyper

#endif
