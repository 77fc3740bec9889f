#ifndef GHOLDER_GAUSS_HPP
#define GHOLDER_GAUSS_HPP

#include <cstdint>
#include <vector>

#include "gholder/core.hpp"
#include "gholder/symlin.hpp"

namespace gholder::gauss {

/// Block sizes n_1..n_m of the concatenated Gaussian vector, N = sum n_i.
struct BlockStructure {
  std::vector<int> sizes;

  int count() const { return static_cast<int>(sizes.size()); }
  int total() const;
  int offset(int i) const;
  void validate() const;
};

/// Input of the matrix criteria: block covariance T plus exponent profile p.
struct GaussianInstance {
  BlockStructure blocks;
  symlin::SymMatrix T;
  std::vector<double> p;

  void validate(double tol = symlin::kDefaultPsdTol) const;
  symlin::SymMatrix diag_block(int i) const;
};

/// f(x) = scale * exp(<linear, x> - 1/2 <quad x, x>). The quadratic part need not be
/// PSD; integrability is decided where the function is integrated.
struct QuadExpFunction {
  int dim = 1;
  double scale = 1.0;
  VectorXd linear;
  symlin::SymMatrix quad;

  static QuadExpFunction exp_linear(const VectorXd& alpha);
  static QuadExpFunction one(int dim);

  double log_eval(const VectorXd& x) const {
    return std::log(scale) + linear.dot(x) - 0.5 * x.dot(quad.mat() * x);
  }
  double eval(const VectorXd& x) const { return std::exp(log_eval(x)); }
  void validate() const;
};

struct LpValue {
  double value = 0.0;  // extended real in [0, inf]
  double exponent = 1.0;
};

/// count x N matrix of i.i.d. N(0, T) draws, generated through the eigenfactor of T
/// so singular covariances sample on their range space.
Eigen::MatrixXd sample(const GaussianInstance& instance, std::int64_t count, std::uint64_t seed);

/// E prod_i exp(<alpha_i, X_i>) = exp(1/2 <T alpha, alpha>).
double exp_moment(const symlin::SymMatrix& T, const VectorXd& alpha);

/// prod_i (E f_i^{p_i})^{1/p_i} for the same exponential tuple: exp(1/2 <P alpha, alpha>)
/// with P = diag(p_i T_ii); a p_i = 0 factor contributes 1 (geometric-mean reading).
double holder_rhs_exponential(const GaussianInstance& instance, const VectorXd& alpha);

/// Exact (E f^p)^{1/p} under N(0, covariance); +inf when the defining integral
/// diverges; p = 0 returns exp(E log f) = scale * exp(-tr(quad * covariance)/2).
LpValue gaussian_lp_norm(const QuadExpFunction& f, const symlin::SymMatrix& covariance, double p);

/// Exact E prod f_i(X_i) for X ~ N(0, T); +inf on divergence. Valid for singular T.
double product_expectation_closed(const GaussianInstance& instance,
                                  const std::vector<QuadExpFunction>& fs);

/// Pullback product: g(x) = prod f_i(U_i x) collapsed into a single QuadExpFunction.
QuadExpFunction compose_pullback(const std::vector<QuadExpFunction>& fs,
                                 const std::vector<symlin::RectMatrix>& maps);

/// int_{R^n} f dx in closed form; +inf unless the quadratic part is positive definite.
double lebesgue_integral(const QuadExpFunction& f);

/// (int f^p dx)^{1/p} over Lebesgue measure, extended-real; p = 0 is rejected
/// (no geometric mean against an infinite measure).
double lebesgue_lp_norm(const QuadExpFunction& f, double p);

}  // namespace gholder::gauss

#endif
