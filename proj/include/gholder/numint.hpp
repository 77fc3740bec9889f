#ifndef GHOLDER_NUMINT_HPP
#define GHOLDER_NUMINT_HPP

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "gholder/core.hpp"
#include "gholder/symlin.hpp"

namespace gholder::numint {

/// Weight of a tensor quadrature rule.
struct GaussianStandard {};                       // gamma_dims, probabilists' normalization
struct GaussianCov { symlin::SymMatrix sigma; };  // N(0, sigma); singular sigma allowed
struct LebesgueBox { VectorXd lo, hi; };          // Gauss-Legendre on the box

using QuadratureWeight = std::variant<GaussianStandard, GaussianCov, LebesgueBox>;

struct QuadratureSpec {
  int nodes_per_dim = 40;
  int dims = 1;
  QuadratureWeight weight = GaussianStandard{};
};

struct McSpec {
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  int batches = 20;
};

struct Estimate {
  double value = 0.0;                  // extended real
  std::optional<double> std_error;     // MC only
  std::optional<double> refine_delta;  // quadrature: |value - value at nodes/2|
};

/// Probabilists' Gauss-Hermite rule: weights sum to 1, sum w_i x_i^2 = 1,
/// exact for polynomials of degree < 2*nodes.
void gauss_hermite(int nodes, VectorXd& points, VectorXd& weights);

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
void gauss_legendre(int nodes, VectorXd& points, VectorXd& weights);

/// Tensor-product quadrature of f against the spec's weight.
Estimate integrate(const NumericFn& f, const QuadratureSpec& spec);

/// Batched Monte Carlo estimate of E f(X), X ~ N(0, covariance).
Estimate mc_expect(const NumericFn& f, const symlin::SymMatrix& covariance, const McSpec& spec);

/// Extended L^p functional of a nonnegative integrand against the spec's measure:
/// (int f^p)^{1/p} for p != 0, exp(int log f) for |p| < 1e-6.
double lp_norm(const NumericFn& f, const QuadratureSpec& spec, double p);

/// Deterministic standard-normal draws (Box-Muller over a fixed 64-bit generator),
/// shared by every sampling path in the library.
class NormalSource {
 public:
  explicit NormalSource(std::uint64_t seed);
  double next();

 private:
  std::uint64_t state_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
  double uniform();
};

}  // namespace gholder::numint

#endif
