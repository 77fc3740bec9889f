#include "gholder/barthe.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gholder/numint.hpp"

namespace gholder::barthe {

namespace {

double log_det_pd(const Eigen::MatrixXd& M, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (M + M.transpose()));
  const double lmax = eig.eigenvalues().maxCoeff();
  double acc = 0.0;
  for (int i = 0; i < M.rows(); ++i) {
    const double v = eig.eigenvalues()(i);
    if (v <= 1e-12 * std::max(1.0, lmax)) fail(ErrorCode::SingularBlock, what);
    acc += std::log(v);
  }
  return acc;
}

// Flattened tensor Gauss-Legendre grid on [-L, L]^dims.
struct BoxGrid {
  Eigen::MatrixXd points;  // count x dims
  VectorXd weights;
  int count = 0;
};

BoxGrid box_grid(int dims, double halfwidth, int nodes) {
  VectorXd p, w;
  numint::gauss_legendre(nodes, p, w);
  double total = 1.0;
  for (int d = 0; d < dims; ++d) total *= nodes;
  if (total > 2e7) fail(ErrorCode::InvalidInput, "quadrature grid exceeds the node budget");
  BoxGrid grid;
  grid.count = static_cast<int>(total);
  grid.points.resize(grid.count, std::max(dims, 1));
  grid.weights.resize(grid.count);
  if (dims == 0) {
    grid.weights(0) = 1.0;
    return grid;
  }
  std::vector<int> idx(dims, 0);
  for (int k = 0; k < grid.count; ++k) {
    double weight = 1.0;
    for (int d = 0; d < dims; ++d) {
      grid.points(k, d) = halfwidth * p(idx[d]);
      weight *= halfwidth * w(idx[d]);
    }
    grid.weights(k) = weight;
    int d = 0;
    while (d < dims && ++idx[d] == nodes) idx[d++] = 0;
  }
  return grid;
}

// log sum_k w_k exp(a_k), tolerating -inf entries.
double log_weighted_sum_exp(const VectorXd& log_terms, const VectorXd& weights) {
  double peak = -kInf;
  for (int k = 0; k < log_terms.size(); ++k)
    if (std::isfinite(log_terms(k))) peak = std::max(peak, log_terms(k));
  if (!std::isfinite(peak)) return -kInf;
  long double acc = 0.0L;
  for (int k = 0; k < log_terms.size(); ++k)
    if (std::isfinite(log_terms(k))) acc += weights(k) * std::exp(log_terms(k) - peak);
  if (acc <= 0) return -kInf;
  return peak + std::log(static_cast<double>(acc));
}

symlin::SymMatrix inverse_pd(const symlin::SymMatrix& M, const char* what) {
  if (!symlin::psd_classify(M).is_pd()) fail(ErrorCode::SingularBlock, what);
  return symlin::SymMatrix(Eigen::MatrixXd(M.mat().inverse()));
}

}  // namespace

int BartheInstance::total_rows() const {
  int N = 0;
  for (const auto& U : U_list) N += static_cast<int>(U.rows());
  return N;
}

symlin::RectMatrix BartheInstance::W_block(int i) const {
  int row = 0;
  for (int k = 0; k < i; ++k) row += block_sizes[k];
  return W.middleRows(row, block_sizes[i]);
}

RhoProfile RhoProfile::make(const std::vector<double>& c, double rho) {
  if (!(rho > 0)) fail(ErrorCode::InvalidInput, "rho must be positive");
  RhoProfile profile;
  profile.rho = rho;
  for (double ci : c) {
    const double denom = ci + (1.0 - ci) / rho;
    if (!(denom > 0)) fail(ErrorCode::InvalidExponent, "profile exponent is not positive");
    profile.p.push_back(1.0 / denom);
  }
  return profile;
}

BartheInstance validate_instance(const std::vector<symlin::RectMatrix>& U_list,
                                 const symlin::SymMatrix& A, const std::vector<double>& c,
                                 const std::optional<symlin::RectMatrix>& W) {
  if (U_list.empty() || c.size() != U_list.size())
    fail(ErrorCode::InvalidInput, "need matching map and weight lists");
  if (!symlin::psd_classify(A).is_pd())
    fail(ErrorCode::InvalidInput, "A must be positive definite");

  BartheInstance inst;
  inst.U_list = U_list;
  inst.A = A;
  inst.c = c;
  const int n = A.dim();

  double weight_sum = 0.0;
  for (size_t i = 0; i < U_list.size(); ++i) {
    if (!(c[i] > 0)) fail(ErrorCode::InvalidInput, "weights must be positive");
    const auto& U = U_list[i];
    if (U.cols() != n || U.rows() < 1 || U.rows() > n)
      fail(ErrorCode::InvalidInput, "map shape mismatch");
    inst.block_sizes.push_back(static_cast<int>(U.rows()));
    weight_sum += c[i] * U.rows();
    symlin::SymMatrix Ai(Eigen::MatrixXd(U * A.mat() * U.transpose()));
    inst.A_blocks.push_back(Ai);
    inst.sqrt_A_blocks.push_back(symlin::sqrt_psd(Ai));
  }
  if (std::abs(weight_sum - n) > 1e-10)
    fail(ErrorCode::AssumptionFailed,
         "sum c_i n_i = n fails, residual " + std::to_string(weight_sum - n));

  const int N = inst.total_rows();
  // U^T C_A U = A^{-1} with C_A = diag(c_i A_i^{-1}).
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < inst.count(); ++i) {
    const Eigen::MatrixXd Ainv_i =
        inverse_pd(inst.A_blocks[i], "singular diagonal block").mat();
    lhs += c[i] * U_list[i].transpose() * Ainv_i * U_list[i];
  }
  const Eigen::MatrixXd Ainv = A.mat().inverse();
  const double residual = (lhs - Ainv).norm() / std::max(1.0, Ainv.norm());
  if (residual > 1e-9)
    fail(ErrorCode::AssumptionFailed,
         "U^T C_A U = A^{-1} fails, residual " + std::to_string(residual));

  // Completion: M = sqrt(C_A) U sqrt(A) is an isometry; W spans its cokernel.
  Eigen::MatrixXd M(N, n);
  const symlin::SymMatrix sqrtA = symlin::sqrt_psd(A);
  int row = 0;
  for (int i = 0; i < inst.count(); ++i) {
    const Eigen::MatrixXd sqrt_ci_Ainv =
        std::sqrt(c[i]) * inverse_pd(inst.sqrt_A_blocks[i], "singular block root").mat();
    M.middleRows(row, inst.block_sizes[i]) = sqrt_ci_Ainv * U_list[i] * sqrtA.mat();
    row += inst.block_sizes[i];
  }
  if (W.has_value()) {
    inst.W = *W;
    if (inst.W.rows() != N || inst.W.cols() != N - n)
      fail(ErrorCode::InvalidInput, "W shape mismatch");
    const double completion_residual =
        (M * M.transpose() + inst.W * inst.W.transpose() - Eigen::MatrixXd::Identity(N, N))
            .norm();
    if (completion_residual > 1e-9 * N)
      fail(ErrorCode::AssumptionFailed,
           "completion identity fails, residual " + std::to_string(completion_residual));
  } else {
    inst.W = symlin::orthonormal_complement(M);
  }
  return inst;
}

BartheInstance lambda_instance(double lambda, int n) {
  if (!(lambda > 0) || !(lambda < 1)) fail(ErrorCode::InvalidInput, "lambda must be in (0, 1)");
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  symlin::RectMatrix W(2 * n, n);
  W << std::sqrt(1.0 - lambda) * I, -std::sqrt(lambda) * I;
  return validate_instance({I, I}, symlin::SymMatrix(I), {lambda, 1.0 - lambda}, W);
}

double gamma_rho(const BartheInstance& instance, double rho) {
  const RhoProfile profile = RhoProfile::make(instance.c, rho);
  const int n = instance.ambient_dim();
  const int N = instance.total_rows();
  double log_gamma = 0.5 * log_det_pd(instance.A.mat(), "singular A");
  log_gamma -= (N - n) / (2.0 * rho) * std::log(rho);
  for (int i = 0; i < instance.count(); ++i) {
    const double pi = profile.p[i];
    const int ni = instance.block_sizes[i];
    log_gamma += ni / (2.0 * pi) * std::log(instance.c[i] * pi);
    log_gamma -= log_det_pd(instance.A_blocks[i].mat(), "singular block") / (2.0 * pi);
  }
  return std::exp(log_gamma);
}

double F_eval(const BartheInstance& instance, const std::vector<NumericFn>& fs, const VectorXd& x,
              const VectorXd& y) {
  double acc = 1.0;
  for (int i = 0; i < instance.count(); ++i) {
    const VectorXd arg = instance.U_list[i] * x +
                         (1.0 / std::sqrt(instance.c[i])) * instance.sqrt_A_blocks[i].mat() *
                             (instance.W_block(i) * y);
    acc *= fs[i](arg);
  }
  return acc;
}

TwoSidedReport verify_two_sided(const BartheInstance& instance, const std::vector<NumericFn>& fs,
                                double rho, const TwoSidedOptions& opts, double rtol) {
  if (static_cast<int>(fs.size()) != instance.count())
    fail(ErrorCode::InvalidInput, "one integrand per block required");
  const int n = instance.ambient_dim();
  const int N = instance.total_rows();
  if (N > 4) fail(ErrorCode::InvalidInput, "quadrature is capped at total dimension 4");
  const RhoProfile profile = RhoProfile::make(instance.c, rho);

  TwoSidedReport rep;
  rep.rho = rho;

  // G2 = Gamma_rho prod ||f_i||_{p_i}.
  rep.G2 = gamma_rho(instance, rho);
  for (int i = 0; i < instance.count(); ++i) {
    numint::QuadratureSpec spec;
    spec.nodes_per_dim = opts.nodes_per_dim;
    spec.dims = instance.block_sizes[i];
    spec.weight = numint::LebesgueBox{VectorXd::Constant(spec.dims, -opts.box_halfwidth),
                                      VectorXd::Constant(spec.dims, opts.box_halfwidth)};
    rep.G2 = ext_mul(rep.G2, numint::lp_norm(fs[i], spec, profile.p[i]));
  }

  const BoxGrid xs = box_grid(n, opts.box_halfwidth, opts.nodes_per_dim);
  const BoxGrid ys = box_grid(N - n, opts.box_halfwidth, opts.nodes_per_dim);
  if (static_cast<double>(xs.count) * ys.count > 5e7)
    fail(ErrorCode::InvalidInput, "nested grid exceeds the node budget; reduce nodes_per_dim");

  // G1: outer integral over x of (inner integral of F^rho over y)^{1/rho},
  // inner sum in the log domain since F^rho spans many decades.
  long double g1 = 0.0L;
  VectorXd log_terms(ys.count);
  for (int kx = 0; kx < xs.count; ++kx) {
    const VectorXd x = xs.points.row(kx).head(n);
    for (int ky = 0; ky < ys.count; ++ky) {
      const VectorXd y = ys.points.row(ky).head(N - n);
      const double F = F_eval(instance, fs, x, y);
      log_terms(ky) = F > 0 ? rho * std::log(F) : -kInf;
    }
    const double log_inner = log_weighted_sum_exp(log_terms, ys.weights);
    if (std::isfinite(log_inner)) g1 += xs.weights(kx) * std::exp(log_inner / rho);
  }
  rep.G1 = static_cast<double>(g1);

  // G3: (int_y (int_x F dx)^rho dy)^{1/rho}.
  VectorXd log_slice(ys.count);
  for (int ky = 0; ky < ys.count; ++ky) {
    const VectorXd y = ys.points.row(ky).head(N - n);
    long double inner = 0.0L;
    for (int kx = 0; kx < xs.count; ++kx)
      inner += xs.weights(kx) * F_eval(instance, fs, xs.points.row(kx).head(n), y);
    log_slice(ky) = inner > 0 ? rho * std::log(static_cast<double>(inner)) : -kInf;
  }
  const double log_g3 = log_weighted_sum_exp(log_slice, ys.weights);
  rep.G3 = std::isfinite(log_g3) ? std::exp(log_g3 / rho) : 0.0;

  if (!std::isfinite(rep.G1) || !std::isfinite(rep.G2) || !std::isfinite(rep.G3)) {
    rep.inconclusive = true;
    return rep;
  }
  const double scale = std::max({rep.G1, rep.G2, rep.G3});
  const double slack = rtol * scale;
  if (rho > 1.0) {
    rep.chain_holds = rep.G1 >= rep.G2 - slack && rep.G2 >= rep.G3 - slack;
  } else if (rho < 1.0) {
    rep.chain_holds = rep.G1 <= rep.G2 + slack && rep.G2 <= rep.G3 + slack;
  } else {
    rep.chain_holds =
        std::abs(rep.G1 - rep.G2) <= slack && std::abs(rep.G2 - rep.G3) <= slack;
  }
  return rep;
}

M2Profile m2_profile(double lambda, double rho, int n) {
  if (!(lambda > 0) || !(lambda < 1)) fail(ErrorCode::InvalidInput, "lambda must be in (0, 1)");
  if (!(rho > 0)) fail(ErrorCode::InvalidInput, "rho must be positive");
  M2Profile out;
  out.p1 = rho / ((rho - 1.0) * lambda + 1.0);
  out.p2 = rho / ((rho - 1.0) * (1.0 - lambda) + 1.0);
  out.constant = gamma_rho(lambda_instance(lambda, n), rho);
  return out;
}

double conv_constants(double lambda, double rho, int n) {
  const M2Profile profile = m2_profile(lambda, rho, n);
  return profile.constant / std::pow(lambda * (1.0 - lambda), n / (2.0 * rho));
}

namespace {

// Midpoint composite rule; first-order but indifferent to jump discontinuities.
double midpoint_integral(const NumericFn& f, double halfwidth, int cells_per_dim) {
  const int dims = f.dim;
  int per_dim = cells_per_dim;
  while (std::pow(static_cast<double>(per_dim), dims) > 4e6) per_dim /= 2;
  per_dim = std::max(per_dim, 2);
  const double h = 2.0 * halfwidth / per_dim;
  double cell = 1.0;
  for (int d = 0; d < dims; ++d) cell *= h;

  std::vector<int> idx(dims, 0);
  long double acc = 0.0L;
  VectorXd x(dims);
  while (true) {
    for (int d = 0; d < dims; ++d) x(d) = -halfwidth + (idx[d] + 0.5) * h;
    const double v = f(x);
    if (std::isnan(v)) fail(ErrorCode::IntegrandError, "integrand returned NaN");
    acc += v;
    int d = 0;
    while (d < dims && ++idx[d] == per_dim) idx[d++] = 0;
    if (d == dims) break;
  }
  return static_cast<double>(acc) * cell;
}

}  // namespace

PrekopaReport prekopa_leindler_check(const NumericFn& f, const NumericFn& g, const NumericFn& h,
                                     double lambda, const PrekopaOptions& opts) {
  if (lambda < 0 || lambda > 1) fail(ErrorCode::InvalidInput, "lambda must be in [0, 1]");
  const int n = f.dim;
  if (g.dim != n || h.dim != n) fail(ErrorCode::InvalidInput, "dimension mismatch");

  // Spot-check the pointwise hypothesis on a grid (necessary, not sufficient).
  const int grid = opts.hypothesis_grid;
  const double L = opts.box_halfwidth;
  numint::NormalSource rng(12345);
  for (int a = 0; a < grid; ++a) {
    for (int b = 0; b < grid; ++b) {
      VectorXd x(n), y(n);
      if (n == 1) {
        x(0) = -L + 2.0 * L * a / (grid - 1);
        y(0) = -L + 2.0 * L * b / (grid - 1);
      } else {
        for (int d = 0; d < n; ++d) {
          x(d) = L * std::clamp(rng.next() / 3.0, -1.0, 1.0);
          y(d) = L * std::clamp(rng.next() / 3.0, -1.0, 1.0);
        }
      }
      const double bound = std::pow(f(x), lambda) * std::pow(g(y), 1.0 - lambda);
      const double value = h(lambda * x + (1.0 - lambda) * y);
      if (value < bound - opts.hypothesis_slack * std::max(1.0, bound))
        fail(ErrorCode::HypothesisFailed, "pointwise hypothesis fails on the grid");
    }
  }

  PrekopaReport rep;
  rep.int_f = midpoint_integral(f, L, opts.cells_per_dim);
  rep.int_g = midpoint_integral(g, L, opts.cells_per_dim);
  rep.int_h = midpoint_integral(h, L, opts.cells_per_dim);
  rep.rhs = std::pow(rep.int_f, lambda) * std::pow(rep.int_g, 1.0 - lambda);
  rep.pass = rep.int_h >= rep.rhs * (1.0 - 1e-6) - 1e-12;
  return rep;
}

BlBartheReport bl_barthe_constants(const BartheInstance& instance, const TwoSidedOptions& opts,
                                   double rtol) {
  const int n = instance.ambient_dim();
  if (n > 2) fail(ErrorCode::InvalidInput, "extremizer quadrature is capped at dimension 2");

  BlBartheReport rep;
  double log_const = 0.5 * log_det_pd(instance.A.mat(), "singular A");
  for (int i = 0; i < instance.count(); ++i)
    log_const -= 0.5 * instance.c[i] * log_det_pd(instance.A_blocks[i].mat(), "singular block");
  rep.constant = std::exp(log_const);

  const auto box = [&](int dims) {
    numint::QuadratureSpec spec;
    spec.nodes_per_dim = opts.nodes_per_dim;
    spec.dims = dims;
    spec.weight = numint::LebesgueBox{VectorXd::Constant(dims, -opts.box_halfwidth),
                                      VectorXd::Constant(dims, opts.box_halfwidth)};
    return spec;
  };

  // Product-integral side: f_i = exp(-c_i <x, A_i^{-1} x>).
  std::vector<gauss::QuadExpFunction> bl_fs;
  for (int i = 0; i < instance.count(); ++i) {
    gauss::QuadExpFunction fi;
    fi.dim = instance.block_sizes[i];
    fi.linear = VectorXd::Zero(fi.dim);
    fi.quad = symlin::SymMatrix(
        Eigen::MatrixXd(2.0 * instance.c[i] * instance.A_blocks[i].mat().inverse()));
    bl_fs.push_back(fi);
  }
  NumericFn bl_product = make_fn(n, [&](const VectorXd& x) {
    double acc = 1.0;
    for (int i = 0; i < instance.count(); ++i) acc *= bl_fs[i].eval(instance.U_list[i] * x);
    return acc;
  });
  rep.bl_lhs = numint::integrate(bl_product, box(n)).value;
  rep.bl_rhs = rep.constant;
  for (int i = 0; i < instance.count(); ++i) {
    NumericFn fi = make_fn(instance.block_sizes[i],
                           [&, i](const VectorXd& x) { return bl_fs[i].eval(x); });
    rep.bl_rhs *= numint::lp_norm(fi, box(instance.block_sizes[i]), 1.0 / instance.c[i]);
  }
  rep.bl_gap = std::abs(rep.bl_lhs - rep.bl_rhs) / std::max(rep.bl_lhs, rep.bl_rhs);

  // Norm-product side: f_i = exp(-c_i <x, A_i x>/2) against f = exp(-<x, A x>/2).
  rep.barthe_lhs = 1.0;
  for (int i = 0; i < instance.count(); ++i) {
    gauss::QuadExpFunction fi;
    fi.dim = instance.block_sizes[i];
    fi.linear = VectorXd::Zero(fi.dim);
    fi.quad = symlin::SymMatrix(Eigen::MatrixXd(instance.c[i] * instance.A_blocks[i].mat()));
    NumericFn fn =
        make_fn(fi.dim, [fi](const VectorXd& x) { return fi.eval(x); });
    rep.barthe_lhs *= numint::lp_norm(fn, box(fi.dim), 1.0 / instance.c[i]);
  }
  NumericFn f_ambient = make_fn(n, [&](const VectorXd& x) {
    return std::exp(-0.5 * x.dot(instance.A.mat() * x));
  });
  rep.barthe_rhs = rep.constant * numint::integrate(f_ambient, box(n)).value;
  rep.barthe_gap =
      std::abs(rep.barthe_lhs - rep.barthe_rhs) / std::max(rep.barthe_lhs, rep.barthe_rhs);

  rep.extremizers_achieve = rep.bl_gap <= rtol && rep.barthe_gap <= rtol;
  return rep;
}

double entropy(const NumericFn& f, const EntropyOptions& opts) {
  NumericFn flogf = make_fn(f.dim, [&f](const VectorXd& x) {
    const double v = f(x);
    if (v < 0 || std::isnan(v)) fail(ErrorCode::IntegrandError, "entropy needs f >= 0");
    return v > 0 ? v * std::log(v) : 0.0;
  });
  const double mass = midpoint_integral(f, opts.box_halfwidth, 20000);
  const double moment = midpoint_integral(flogf, opts.box_halfwidth, 20000);
  if (!(mass > 0) || !std::isfinite(moment))
    fail(ErrorCode::IntegrandError, "entropy integral is inconclusive");
  return moment - mass * std::log(mass);
}

EntropyReport entropy_inequality_check(const BartheInstance& instance,
                                       const std::vector<NumericFn>& gs,
                                       const EntropyOptions& opts, double tol) {
  if (static_cast<int>(gs.size()) != instance.count())
    fail(ErrorCode::InvalidInput, "one density per block required");
  const int n = instance.ambient_dim();
  const int N = instance.total_rows();
  if (N > 4) fail(ErrorCode::InvalidInput, "quadrature is capped at total dimension 4");

  const auto box = [&](int dims) {
    numint::QuadratureSpec spec;
    spec.nodes_per_dim = opts.nodes_per_dim;
    spec.dims = dims;
    spec.weight = numint::LebesgueBox{VectorXd::Constant(dims, -opts.box_halfwidth),
                                      VectorXd::Constant(dims, opts.box_halfwidth)};
    return spec;
  };
  for (int i = 0; i < instance.count(); ++i) {
    const double mass = numint::integrate(gs[i], box(instance.block_sizes[i])).value;
    if (std::abs(mass - 1.0) > 1e-8)
      fail(ErrorCode::NotDensity, "density " + std::to_string(i) + " has mass " +
                                      std::to_string(mass));
  }

  EntropyReport rep;
  double log_d1 = -0.5 * log_det_pd(instance.A.mat(), "singular A");
  rep.D2 = 0.0;
  for (int i = 0; i < instance.count(); ++i) {
    const double logdet = log_det_pd(instance.A_blocks[i].mat(), "singular block");
    log_d1 += 0.5 * logdet;
    rep.D2 += 0.5 * (1.0 - instance.c[i]) * logdet;
  }
  rep.D1 = std::exp(log_d1);

  // G(x, y) = prod g_i(sqrt(c_i) U_i x + W_i y).
  const auto G = [&](const VectorXd& x, const VectorXd& y) {
    double acc = 1.0;
    for (int i = 0; i < instance.count(); ++i)
      acc *= gs[i](std::sqrt(instance.c[i]) * (instance.U_list[i] * x) +
                   instance.W_block(i) * y);
    return acc;
  };

  const BoxGrid xs = box_grid(n, opts.box_halfwidth, opts.nodes_per_dim);
  const BoxGrid ys = box_grid(N - n, opts.box_halfwidth, opts.nodes_per_dim);
  if (static_cast<double>(xs.count) * ys.count > 5e7)
    fail(ErrorCode::InvalidInput, "nested grid exceeds the node budget; reduce nodes_per_dim");

  const auto ent_on_grid = [](const VectorXd& values, const VectorXd& weights) {
    long double mass = 0.0L, moment = 0.0L;
    for (int k = 0; k < values.size(); ++k) {
      const double v = values(k);
      mass += weights(k) * v;
      if (v > 0) moment += weights(k) * v * std::log(v);
    }
    const double m = static_cast<double>(mass);
    return static_cast<double>(moment) - m * std::log(std::max(m, 1e-300));
  };

  // lhs: entropy in y of the x-marginal of G.
  VectorXd marginal(ys.count);
  for (int ky = 0; ky < ys.count; ++ky) {
    long double acc = 0.0L;
    for (int kx = 0; kx < xs.count; ++kx)
      acc += xs.weights(kx) * G(xs.points.row(kx).head(n), ys.points.row(ky).head(N - n));
    marginal(ky) = static_cast<double>(acc);
  }
  rep.lhs = rep.D1 * ent_on_grid(marginal, ys.weights);

  // middle: sum (1 - c_i) Ent(g_i) + D2, entropies on the same box.
  rep.middle = rep.D2;
  std::vector<double> ent_g(instance.count());
  for (int i = 0; i < instance.count(); ++i) {
    const BoxGrid bs = box_grid(instance.block_sizes[i], opts.box_halfwidth, opts.nodes_per_dim);
    VectorXd vals(bs.count);
    for (int k = 0; k < bs.count; ++k)
      vals(k) = gs[i](bs.points.row(k).head(instance.block_sizes[i]));
    ent_g[i] = ent_on_grid(vals, bs.weights);
    rep.middle += (1.0 - instance.c[i]) * ent_g[i];
  }

  // rhs: integral over x of the entropy in y of G(x, .).
  long double rhs_acc = 0.0L;
  VectorXd slice(ys.count);
  for (int kx = 0; kx < xs.count; ++kx) {
    for (int ky = 0; ky < ys.count; ++ky)
      slice(ky) = G(xs.points.row(kx).head(n), ys.points.row(ky).head(N - n));
    rhs_acc += xs.weights(kx) * ent_on_grid(slice, ys.weights);
  }
  rep.rhs = rep.D1 * static_cast<double>(rhs_acc);

  rep.chain_holds = rep.lhs <= rep.middle + tol && rep.middle <= rep.rhs + tol;

  // Derivative cross-check: G2(rho) = Gamma_rho prod ||f_i||_{p_i}, f_i = g_i(sqrt(c_i) .).
  const auto G2_at = [&](double rho) {
    const RhoProfile profile = RhoProfile::make(instance.c, rho);
    double value = gamma_rho(instance, rho);
    for (int i = 0; i < instance.count(); ++i) {
      const double ci = instance.c[i];
      NumericFn fi = make_fn(instance.block_sizes[i], [&, ci, i](const VectorXd& x) {
        return gs[i](std::sqrt(ci) * x);
      });
      numint::QuadratureSpec spec = box(instance.block_sizes[i]);
      spec.weight =
          numint::LebesgueBox{VectorXd::Constant(instance.block_sizes[i],
                                                 -opts.box_halfwidth / std::sqrt(ci)),
                              VectorXd::Constant(instance.block_sizes[i],
                                                 opts.box_halfwidth / std::sqrt(ci))};
      value *= numint::lp_norm(fi, spec, profile.p[i]);
    }
    return value;
  };
  const double h = opts.fd_step;
  rep.g2_derivative_fd = (G2_at(1.0 + h) - G2_at(1.0 - h)) / (2.0 * h);
  rep.g2_derivative_closed = rep.middle / rep.D1;
  return rep;
}

BartheOriginalReport barthe_original(double p, double q, double r, const NumericFn& f,
                                     const NumericFn& g, const NumericFn& F, const NumericFn& G,
                                     const TwoSidedOptions& opts, double rtol) {
  if (!(p > 1) || !(q > 1) || !(r > 1)) fail(ErrorCode::NotConjugate, "need p, q, r > 1");
  if (std::abs(1.0 / p + 1.0 / q - 1.0 - 1.0 / r) > 1e-12)
    fail(ErrorCode::NotConjugate, "1/p + 1/q = 1 + 1/r fails");
  if (f.dim != 1 || g.dim != 1 || F.dim != 1 || G.dim != 1)
    fail(ErrorCode::InvalidInput, "one-dimensional functions required");

  const double rc = r / (r - 1.0), qc = q / (q - 1.0), pc = p / (p - 1.0);
  const double c = std::sqrt(rc / qc), s = std::sqrt(rc / pc);

  const auto mass = [&](const NumericFn& fn) {
    return midpoint_integral(fn, opts.box_halfwidth, 4000);
  };
  const double mf = mass(f), mF = mass(F), mg = mass(g), mG = mass(G);
  if (!approx_eq(mf, mF, 1e-8) || !approx_eq(mg, mG, 1e-8))
    fail(ErrorCode::NormalizationFailed, "masses of the transported pairs must match");

  const BoxGrid grid = box_grid(1, opts.box_halfwidth, opts.nodes_per_dim);
  VectorXd e1(1), arg1(1), arg2(1);

  // lhs: (int (int f^{1/p}(cx - sy) g^{1/q}(sx + cy) dx)^r dy)^{1/r}
  long double outer = 0.0L;
  for (int ky = 0; ky < grid.count; ++ky) {
    const double y = grid.points(ky, 0);
    long double inner = 0.0L;
    for (int kx = 0; kx < grid.count; ++kx) {
      const double x = grid.points(kx, 0);
      arg1(0) = c * x - s * y;
      arg2(0) = s * x + c * y;
      inner += grid.weights(kx) * std::pow(f(arg1), 1.0 / p) * std::pow(g(arg2), 1.0 / q);
    }
    outer += grid.weights(ky) * std::pow(static_cast<double>(inner), r);
  }

  // rhs: int (int F^{r/p}(cX - sY) G^{r/q}(sX + cY) dY)^{1/r} dX
  long double rhs = 0.0L;
  for (int kx = 0; kx < grid.count; ++kx) {
    const double X = grid.points(kx, 0);
    long double inner = 0.0L;
    for (int ky = 0; ky < grid.count; ++ky) {
      const double Y = grid.points(ky, 0);
      arg1(0) = c * X - s * Y;
      arg2(0) = s * X + c * Y;
      inner += grid.weights(ky) * std::pow(F(arg1), r / p) * std::pow(G(arg2), r / q);
    }
    rhs += grid.weights(kx) * std::pow(static_cast<double>(inner), 1.0 / r);
  }

  BartheOriginalReport rep;
  rep.lhs = std::pow(static_cast<double>(outer), 1.0 / r);
  rep.rhs = static_cast<double>(rhs);
  rep.pass = rep.lhs <= rep.rhs * (1.0 + rtol);
  return rep;
}

}  // namespace gholder::barthe
