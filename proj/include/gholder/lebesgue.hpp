#ifndef GHOLDER_LEBESGUE_HPP
#define GHOLDER_LEBESGUE_HPP

#include <vector>

#include "gholder/gauss.hpp"
#include "gholder/symlin.hpp"

namespace gholder::lebesgue {

/// Data of the Lebesgue-measure criterion: full-rank maps U_i (n_i x n), a positive
/// definite base matrix B, and exponents p_i.
struct FrameInstance {
  std::vector<symlin::RectMatrix> U_list;
  symlin::SymMatrix B;
  std::vector<double> p;

  int count() const { return static_cast<int>(U_list.size()); }
  int ambient_dim() const { return B.dim(); }
  symlin::SymMatrix block(int i) const;  // U_i B U_i^T
  void validate(double tol = 1e-9) const;
};

struct YoungTriple {
  double p = 2.0, q = 2.0, r = 1.0;
  void validate() const;  // 1/p + 1/q = 1 + 1/r within 1e-12, all positive
};

enum class Direction { Upper, Lower, Both, Neither };
const char* direction_name(Direction d);

struct Lemma4Report {
  bool via_condition = false;  // homogeneity + PSD comparison
  bool via_inverse_identity = false;
  bool via_block_sum = false;
  double homogeneity_residual = 0.0;
  double psd_margin = 0.0;  // min eigenvalue of P D - U B U^T
  double inverse_residual = 0.0;
  double block_sum_residual = 0.0;
  bool consistent = false;
};

struct YoungData {
  FrameInstance upper;   // built on B_1; Upper condition for p, q, r > 1
  FrameInstance lower;   // built on B_2; Lower condition for p, q, r < 1
  double constant = 0.0;  // C^n by the closed formula
};

struct NumericReport {
  double lhs = 0.0;       // int prod f_i(U_i x) dx
  double rhs = 0.0;       // constant * prod ||f_i||_{p_i}
  double constant = 0.0;
  double ratio = 0.0;     // lhs / rhs
  Direction direction = Direction::Neither;
  bool pass = false;      // inequality in the direction the condition provides
  bool inconclusive = false;
};

/// sum n_i / p_i = n within 1e-10.
bool homogeneity_check(const FrameInstance& instance);

/// PSD comparison of U B U^T against diag(p_i U_i B U_i^T).
Direction condition_check(const FrameInstance& instance, double tol = symlin::kDefaultPsdTol);

/// (det B / prod det(U_i B U_i^T)^{1/p_i})^{1/2}.
double bl_constant(const FrameInstance& instance);

/// The Gaussian tuple f_i = exp(-p_i^{-1} <(U_i B U_i^T)^{-1} x, x>) attaining the
/// upper bound. Requires the Upper condition.
std::vector<gauss::QuadExpFunction> extremizers_upper(const FrameInstance& instance);

/// The three equivalent formulations (condition + homogeneity, inverse identity,
/// block sum), evaluated independently.
Lemma4Report lemma4_equivalences(const FrameInstance& instance, double tol = 1e-8);

/// The stacked-map construction recovering sharp Young: U = [[I,-I],[0,I],[I,0]],
/// exponents (p, q, r'), and the two base matrices for the two directions.
YoungData young_setup(const YoungTriple& triple, int n);

/// C^n with C = C_p C_q / C_r, C_u^2 = |u|^{1/u} / |u'|^{1/u'}.
double young_sharp_constant(const YoungTriple& triple, int n);

struct QuadOptions {
  double box_halfwidth = 10.0;
  int nodes_per_dim = 64;
};

/// Quadrature comparison of the Lebesgue product integral against the sharp bound.
NumericReport verify_lebesgue_numeric(const FrameInstance& instance,
                                      const std::vector<NumericFn>& fs,
                                      const QuadOptions& opts = {}, double rtol = 1e-6);

/// Same comparison with the closed-form quad-exponential family (exact both sides).
NumericReport verify_lebesgue_closed(const FrameInstance& instance,
                                     const std::vector<gauss::QuadExpFunction>& fs,
                                     double rtol = 1e-9);

}  // namespace gholder::lebesgue

#endif
