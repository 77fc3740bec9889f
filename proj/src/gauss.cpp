#include "gholder/gauss.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>

#include "gholder/numint.hpp"

namespace gholder::gauss {

int BlockStructure::total() const { return std::accumulate(sizes.begin(), sizes.end(), 0); }

int BlockStructure::offset(int i) const {
  return std::accumulate(sizes.begin(), sizes.begin() + i, 0);
}

void BlockStructure::validate() const {
  if (sizes.empty()) fail(ErrorCode::InvalidInput, "need at least one block");
  for (int s : sizes)
    if (s < 1) fail(ErrorCode::InvalidInput, "block sizes must be positive");
}

void GaussianInstance::validate(double tol) const {
  blocks.validate();
  if (T.dim() != blocks.total()) fail(ErrorCode::InvalidInput, "covariance dimension mismatch");
  if (static_cast<int>(p.size()) != blocks.count())
    fail(ErrorCode::InvalidInput, "one exponent per block required");
  if (!symlin::psd_classify(T, tol).is_psd())
    fail(ErrorCode::NotPsd, "block covariance must be PSD");
}

symlin::SymMatrix GaussianInstance::diag_block(int i) const {
  const int off = blocks.offset(i);
  const int ni = blocks.sizes[i];
  return T.block(off, off, ni, ni);
}

QuadExpFunction QuadExpFunction::exp_linear(const VectorXd& alpha) {
  QuadExpFunction f;
  f.dim = static_cast<int>(alpha.size());
  f.scale = 1.0;
  f.linear = alpha;
  f.quad = symlin::SymMatrix::zero(f.dim);
  return f;
}

QuadExpFunction QuadExpFunction::one(int dim) {
  return exp_linear(VectorXd::Zero(dim));
}

void QuadExpFunction::validate() const {
  if (dim < 1 || linear.size() != dim || quad.dim() != dim)
    fail(ErrorCode::InvalidInput, "quad-exp function shape mismatch");
  if (!(scale > 0)) fail(ErrorCode::InvalidInput, "scale must be positive");
}

namespace {

// log E exp(<b, X> - 1/2 <M X, X>) for X ~ N(0, UU^T) expressed through the Gram
// factor U (N x r): the integral lives on the rank space, where it equals
// -1/2 log det(K) + 1/2 <K^{-1} U^T b, U^T b> with K = I_r + U^T M U. Divergent
// (returns +inf) unless K is positive definite.
double log_moment_on_range(const symlin::RectMatrix& U, const VectorXd& b,
                           const Eigen::MatrixXd& M) {
  const int r = static_cast<int>(U.cols());
  if (r == 0) return 0.0;  // degenerate point mass at the origin
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(r, r) + U.transpose() * M * U;
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin <= 1e-13 * std::max(1.0, eig.eigenvalues().maxCoeff())) return kInf;
  const VectorXd c = U.transpose() * b;
  double logdet = 0.0;
  for (int i = 0; i < r; ++i) logdet += std::log(eig.eigenvalues()(i));
  return -0.5 * logdet + 0.5 * c.dot(K.ldlt().solve(c));
}

}  // namespace

Eigen::MatrixXd sample(const GaussianInstance& instance, std::int64_t count, std::uint64_t seed) {
  instance.validate();
  const symlin::RectMatrix U = symlin::factor_gram(instance.T);
  const int N = instance.T.dim();
  const int r = static_cast<int>(U.cols());
  numint::NormalSource rng(seed);
  Eigen::MatrixXd out(count, N);
  VectorXd z(r);
  for (std::int64_t s = 0; s < count; ++s) {
    for (int d = 0; d < r; ++d) z(d) = rng.next();
    out.row(s) = (U * z).transpose();
  }
  return out;
}

double exp_moment(const symlin::SymMatrix& T, const VectorXd& alpha) {
  if (alpha.size() != T.dim()) fail(ErrorCode::InvalidInput, "alpha dimension mismatch");
  return std::exp(0.5 * alpha.dot(T.mat() * alpha));
}

double holder_rhs_exponential(const GaussianInstance& instance, const VectorXd& alpha) {
  instance.validate();
  if (alpha.size() != instance.T.dim()) fail(ErrorCode::InvalidInput, "alpha dimension mismatch");
  double quad = 0.0;
  for (int i = 0; i < instance.blocks.count(); ++i) {
    const int off = instance.blocks.offset(i);
    const int ni = instance.blocks.sizes[i];
    const VectorXd ai = alpha.segment(off, ni);
    quad += instance.p[i] * ai.dot(instance.diag_block(i).mat() * ai);
  }
  return std::exp(0.5 * quad);
}

LpValue gaussian_lp_norm(const QuadExpFunction& f, const symlin::SymMatrix& covariance,
                         double p) {
  f.validate();
  if (covariance.dim() != f.dim) fail(ErrorCode::InvalidInput, "covariance dimension mismatch");
  LpValue out;
  out.exponent = p;
  if (p == 0.0) {
    // exp(E log f) = scale * exp(-tr(quad * covariance)/2)
    out.value = f.scale * std::exp(-0.5 * (f.quad.mat() * covariance.mat()).trace());
    return out;
  }
  const symlin::RectMatrix U = symlin::factor_gram(covariance);
  const double log_m = log_moment_on_range(U, p * f.linear, p * f.quad.mat());
  if (std::isinf(log_m)) {
    out.value = ext_pow(kInf, 1.0 / p);  // +inf for p > 0, 0 for p < 0
    return out;
  }
  out.value = f.scale * std::exp(log_m / p);
  return out;
}

double product_expectation_closed(const GaussianInstance& instance,
                                  const std::vector<QuadExpFunction>& fs) {
  instance.validate();
  if (static_cast<int>(fs.size()) != instance.blocks.count())
    fail(ErrorCode::InvalidInput, "one function per block required");
  const int N = instance.T.dim();
  VectorXd a = VectorXd::Zero(N);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  double log_scale = 0.0;
  for (int i = 0; i < instance.blocks.count(); ++i) {
    fs[i].validate();
    const int off = instance.blocks.offset(i);
    const int ni = instance.blocks.sizes[i];
    if (fs[i].dim != ni) fail(ErrorCode::InvalidInput, "function/block dimension mismatch");
    a.segment(off, ni) = fs[i].linear;
    Q.block(off, off, ni, ni) = fs[i].quad.mat();
    log_scale += std::log(fs[i].scale);
  }
  const symlin::RectMatrix U = symlin::factor_gram(instance.T);
  const double log_m = log_moment_on_range(U, a, Q);
  if (std::isinf(log_m)) return kInf;
  return std::exp(log_scale + log_m);
}

QuadExpFunction compose_pullback(const std::vector<QuadExpFunction>& fs,
                                 const std::vector<symlin::RectMatrix>& maps) {
  if (fs.size() != maps.size() || fs.empty())
    fail(ErrorCode::InvalidInput, "need matching function/map lists");
  const int n = static_cast<int>(maps[0].cols());
  QuadExpFunction g;
  g.dim = n;
  g.scale = 1.0;
  g.linear = VectorXd::Zero(n);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  double log_scale = 0.0;
  for (size_t i = 0; i < fs.size(); ++i) {
    fs[i].validate();
    if (maps[i].cols() != n || maps[i].rows() != fs[i].dim)
      fail(ErrorCode::InvalidInput, "map shape mismatch");
    log_scale += std::log(fs[i].scale);
    g.linear += maps[i].transpose() * fs[i].linear;
    Q += maps[i].transpose() * fs[i].quad.mat() * maps[i];
  }
  g.scale = std::exp(log_scale);
  g.quad = symlin::SymMatrix(Q);
  return g;
}

double lebesgue_integral(const QuadExpFunction& f) {
  f.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(f.quad.mat());
  const double lmin = eig.eigenvalues().minCoeff();
  if (lmin <= 1e-13 * std::max(1.0, std::abs(eig.eigenvalues().maxCoeff()))) return kInf;
  double logdet = 0.0;
  for (int i = 0; i < f.dim; ++i) logdet += std::log(eig.eigenvalues()(i));
  const double quad_term = 0.5 * f.linear.dot(f.quad.mat().ldlt().solve(f.linear));
  return f.scale *
         std::exp(0.5 * f.dim * std::log(2.0 * M_PI) - 0.5 * logdet + quad_term);
}

double lebesgue_lp_norm(const QuadExpFunction& f, double p) {
  if (p == 0.0) fail(ErrorCode::InvalidExponent, "Lebesgue geometric mean is undefined");
  QuadExpFunction fp = f;
  fp.scale = 1.0;
  fp.linear = p * f.linear;
  fp.quad = symlin::SymMatrix(Eigen::MatrixXd(p * f.quad.mat()));
  const double integral = lebesgue_integral(fp);
  return f.scale * ext_pow(integral, 1.0 / p);
}

}  // namespace gholder::gauss
