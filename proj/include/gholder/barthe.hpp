#ifndef GHOLDER_BARTHE_HPP
#define GHOLDER_BARTHE_HPP

#include <optional>
#include <vector>

#include "gholder/gauss.hpp"
#include "gholder/symlin.hpp"

namespace gholder::barthe {

/// Data of the two-sided moment inequality: full-rank maps U_i, positive definite A,
/// positive weights c_i with U^T C_A U = A^{-1} and sum c_i n_i = n, plus the
/// orthonormal completion W of sqrt(C_A) U sqrt(A).
struct BartheInstance {
  std::vector<symlin::RectMatrix> U_list;
  symlin::SymMatrix A;
  std::vector<double> c;
  symlin::RectMatrix W;  // N x (N - n)

  // Derived, filled by validate_instance.
  std::vector<symlin::SymMatrix> A_blocks;       // A_i = U_i A U_i^T
  std::vector<symlin::SymMatrix> sqrt_A_blocks;  // A_i^{1/2}
  std::vector<int> block_sizes;

  int count() const { return static_cast<int>(U_list.size()); }
  int ambient_dim() const { return A.dim(); }
  int total_rows() const;
  symlin::RectMatrix W_block(int i) const;
};

struct RhoProfile {
  double rho = 1.0;
  std::vector<double> p;  // p_i = 1 / (c_i + (1 - c_i)/rho)

  static RhoProfile make(const std::vector<double>& c, double rho);
};

/// Checks (A2), the weight balance, and the completion identity; constructs W when
/// absent. Throws AssumptionFailed with the residual norm otherwise.
BartheInstance validate_instance(const std::vector<symlin::RectMatrix>& U_list,
                                 const symlin::SymMatrix& A, const std::vector<double>& c,
                                 const std::optional<symlin::RectMatrix>& W = std::nullopt);

/// The m = 2 decomposition lambda I + (1 - lambda) I = I with W = (sqrt(1-l) I, -sqrt(l) I).
BartheInstance lambda_instance(double lambda, int n);

/// Gamma_rho = det(A)^{1/2} rho^{-(N-n)/(2 rho)} prod (c_i p_i)^{n_i/(2 p_i)} det(A_i)^{-1/(2 p_i)}.
double gamma_rho(const BartheInstance& instance, double rho);

/// F(x, y) = prod f_i(U_i x + c_i^{-1/2} sqrt(A_i) W_i y).
double F_eval(const BartheInstance& instance, const std::vector<NumericFn>& fs, const VectorXd& x,
              const VectorXd& y);

struct TwoSidedOptions {
  double box_halfwidth = 8.0;
  int nodes_per_dim = 200;  // ambient dimension 2 stays cheap; shrink for N = 4
};

struct TwoSidedReport {
  double rho = 1.0;
  double G1 = 0.0;  // int_x (int_y F^rho)^{1/rho}
  double G2 = 0.0;  // Gamma_rho prod ||f_i||_{p_i}
  double G3 = 0.0;  // (int_y (int_x F)^rho)^{1/rho}
  bool chain_holds = false;
  bool inconclusive = false;
};

/// Evaluates the chain G1 >= G2 >= G3 (rho >= 1) or its reverse (rho <= 1) by nested
/// quadrature, with the inner integral accumulated in the log domain.
TwoSidedReport verify_two_sided(const BartheInstance& instance, const std::vector<NumericFn>& fs,
                                double rho, const TwoSidedOptions& opts = {}, double rtol = 1e-6);

struct M2Profile {
  double p1 = 1.0, p2 = 1.0;
  double constant = 0.0;  // Gamma_rho of the lambda instance
};

/// Proposition-7 exponents plus the two-sided constant of the lambda decomposition.
M2Profile m2_profile(double lambda, double rho, int n);

/// Convolution-form constant: gamma_rho of the lambda instance over (lambda(1-lambda))^{n/(2 rho)}.
/// With rho = r and lambda = r'/q' this is the sharp Young constant C^n.
double conv_constants(double lambda, double rho, int n);

struct PrekopaOptions {
  double box_halfwidth = 9.0;
  int cells_per_dim = 20000;  // midpoint rule; robust for indicator integrands
  int hypothesis_grid = 50;
  double hypothesis_slack = 1e-9;
};

struct PrekopaReport {
  double int_f = 0.0, int_g = 0.0, int_h = 0.0;
  double rhs = 0.0;  // (int f)^lambda (int g)^{1-lambda}
  bool pass = false;
};

/// Midpoint-rule check of int h >= (int f)^lambda (int g)^{1-lambda}; the pointwise
/// hypothesis is spot-verified on a grid first (necessary, not sufficient).
PrekopaReport prekopa_leindler_check(const NumericFn& f, const NumericFn& g, const NumericFn& h,
                                     double lambda, const PrekopaOptions& opts = {});

struct BlBartheReport {
  double constant = 0.0;  // (det A / prod det(A_i)^{c_i})^{1/2}
  double bl_lhs = 0.0, bl_rhs = 0.0;          // product integral vs bound
  double barthe_lhs = 0.0, barthe_rhs = 0.0;  // norm product vs constant * int f
  double bl_gap = 0.0, barthe_gap = 0.0;      // relative equality gaps
  bool extremizers_achieve = false;
};

/// Both limit constants with their extremizer tuples verified to achieve equality.
BlBartheReport bl_barthe_constants(const BartheInstance& instance,
                                   const TwoSidedOptions& opts = {}, double rtol = 1e-6);

struct EntropyOptions {
  double box_halfwidth = 8.0;
  int nodes_per_dim = 160;
  double fd_step = 1e-3;
};

struct EntropyReport {
  double lhs = 0.0;     // D1 Ent(int G dx)
  double middle = 0.0;  // sum (1 - c_i) Ent(g_i) + D2
  double rhs = 0.0;     // D1 int Ent(G(x, .)) dx
  double D1 = 0.0, D2 = 0.0;
  bool chain_holds = false;
  double g2_derivative_fd = 0.0;      // finite difference of G2 at rho = 1
  double g2_derivative_closed = 0.0;  // D1^{-1} (middle)
};

/// Ent(f) = int f log f - (int f) log int f over a truncation box.
double entropy(const NumericFn& f, const EntropyOptions& opts = {});

/// The entropy chain for probability densities g_i, with the derivative cross-check
/// of the middle chain member at rho = 1.
EntropyReport entropy_inequality_check(const BartheInstance& instance,
                                       const std::vector<NumericFn>& gs,
                                       const EntropyOptions& opts = {}, double tol = 1e-5);

struct BartheOriginalReport {
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

/// The two-function moment inequality with c = sqrt(r'/q'), s = sqrt(r'/p'):
/// masses of f/F and g/G must match.
BartheOriginalReport barthe_original(double p, double q, double r, const NumericFn& f,
                                     const NumericFn& g, const NumericFn& F, const NumericFn& G,
                                     const TwoSidedOptions& opts = {}, double rtol = 1e-6);

}  // namespace gholder::barthe

#endif
