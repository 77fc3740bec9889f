#include "gholder/numint.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <vector>

namespace gholder::numint {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights come from the
// first components of the eigenvectors scaled by the total mass mu0.
void golub_welsch(const VectorXd& diag, const VectorXd& subdiag, double mu0, VectorXd& points,
                  VectorXd& weights) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag);
  points = solver.eigenvalues();
  const int n = static_cast<int>(diag.size());
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    weights(i) = mu0 * v0 * v0;
  }
}

struct TensorRule {
  // Per-dimension evaluation points laid out as columns of `points`; one scalar
  // weight per multi-index is the product of per-axis weights.
  std::vector<VectorXd> axis_points;
  std::vector<VectorXd> axis_weights;
  // Optional affine map into ambient space: x = shift_base + basis * z.
  Eigen::MatrixXd basis;  // ambient_dim x tensor_dims; identity when empty
  int tensor_dims = 0;
  int ambient_dims = 0;
};

TensorRule build_rule(const QuadratureSpec& spec, int nodes) {
  if (nodes < 1) fail(ErrorCode::InvalidInput, "quadrature needs at least one node");
  if (spec.dims < 1) fail(ErrorCode::InvalidInput, "dimension must be positive");

  TensorRule rule;
  rule.ambient_dims = spec.dims;

  if (std::holds_alternative<GaussianStandard>(spec.weight)) {
    VectorXd p, w;
    gauss_hermite(nodes, p, w);
    rule.tensor_dims = spec.dims;
    rule.axis_points.assign(spec.dims, p);
    rule.axis_weights.assign(spec.dims, w);
  } else if (const auto* cov = std::get_if<GaussianCov>(&spec.weight)) {
    if (cov->sigma.dim() != spec.dims)
      fail(ErrorCode::InvalidInput, "covariance dimension mismatch");
    const symlin::EigDecomposition eig = symlin::eig_sym(cov->sigma);
    const double lmax = std::max(eig.eigenvalues(0), 0.0);
    if (eig.eigenvalues(spec.dims - 1) < -1e-10 * std::max(1.0, lmax))
      fail(ErrorCode::NotPsd, "covariance must be PSD");
    int rank = 0;
    while (rank < spec.dims && eig.eigenvalues(rank) > 1e-12 * std::max(1e-300, lmax)) ++rank;
    VectorXd p, w;
    gauss_hermite(nodes, p, w);
    rule.tensor_dims = rank;
    rule.axis_points.assign(std::max(rank, 0), p);
    rule.axis_weights.assign(std::max(rank, 0), w);
    rule.basis.resize(spec.dims, rank);
    for (int j = 0; j < rank; ++j)
      rule.basis.col(j) = std::sqrt(eig.eigenvalues(j)) * eig.eigenvectors.col(j);
  } else {
    const auto& box = std::get<LebesgueBox>(spec.weight);
    if (box.lo.size() != spec.dims || box.hi.size() != spec.dims)
      fail(ErrorCode::InvalidInput, "box bounds dimension mismatch");
    VectorXd p, w;
    gauss_legendre(nodes, p, w);
    rule.tensor_dims = spec.dims;
    rule.axis_points.resize(spec.dims);
    rule.axis_weights.resize(spec.dims);
    for (int d = 0; d < spec.dims; ++d) {
      const double lo = box.lo(d), hi = box.hi(d);
      if (!(hi > lo)) fail(ErrorCode::InvalidInput, "box bounds must satisfy lo < hi");
      rule.axis_points[d] = 0.5 * (hi - lo) * (p.array() + 1.0) + lo;
      rule.axis_weights[d] = 0.5 * (hi - lo) * w;
    }
  }

  double total = 1.0;
  for (int d = 0; d < rule.tensor_dims; ++d) total *= nodes;
  if (total > 1e8) fail(ErrorCode::InvalidInput, "quadrature grid exceeds the node budget");
  return rule;
}

template <typename Body>
void tensor_iterate(const TensorRule& rule, Body&& body) {
  const int dims = rule.tensor_dims;
  if (dims == 0) {
    VectorXd z(0);
    body(z, 1.0);
    return;
  }
  std::vector<int> idx(dims, 0);
  VectorXd z(dims);
  while (true) {
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      z(d) = rule.axis_points[d](idx[d]);
      w *= rule.axis_weights[d](idx[d]);
    }
    body(z, w);
    int d = 0;
    while (d < dims) {
      if (++idx[d] < rule.axis_points[d].size()) break;
      idx[d] = 0;
      ++d;
    }
    if (d == dims) break;
  }
}

VectorXd to_ambient(const TensorRule& rule, const VectorXd& z) {
  if (rule.basis.rows() == 0) return z;
  return rule.basis * z;  // covers rank-deficient maps, including rank zero
}

double integrate_once(const NumericFn& f, const QuadratureSpec& spec, int nodes) {
  const TensorRule rule = build_rule(spec, nodes);
  long double acc = 0.0L;
  bool diverged = false;
  tensor_iterate(rule, [&](const VectorXd& z, double w) {
    const double v = f(to_ambient(rule, z));
    if (std::isnan(v)) fail(ErrorCode::IntegrandError, "integrand returned NaN");
    if (std::isinf(v)) {
      diverged = true;
      return;
    }
    acc += static_cast<long double>(w) * v;
  });
  if (diverged) return kInf;
  return static_cast<double>(acc);
}

}  // namespace

void gauss_hermite(int nodes, VectorXd& points, VectorXd& weights) {
  if (nodes < 1) fail(ErrorCode::InvalidInput, "need at least one node");
  if (nodes == 1) {
    points = VectorXd::Zero(1);
    weights = VectorXd::Ones(1);
    return;
  }
  VectorXd diag = VectorXd::Zero(nodes);
  VectorXd sub(nodes - 1);
  for (int k = 1; k < nodes; ++k) sub(k - 1) = std::sqrt(static_cast<double>(k));
  golub_welsch(diag, sub, 1.0, points, weights);
}

void gauss_legendre(int nodes, VectorXd& points, VectorXd& weights) {
  if (nodes < 1) fail(ErrorCode::InvalidInput, "need at least one node");
  if (nodes == 1) {
    points = VectorXd::Zero(1);
    weights = VectorXd::Constant(1, 2.0);
    return;
  }
  VectorXd diag = VectorXd::Zero(nodes);
  VectorXd sub(nodes - 1);
  for (int k = 1; k < nodes; ++k) sub(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  golub_welsch(diag, sub, 2.0, points, weights);
}

Estimate integrate(const NumericFn& f, const QuadratureSpec& spec) {
  if (spec.nodes_per_dim < 2) fail(ErrorCode::InvalidInput, "nodes_per_dim must be >= 2");
  Estimate est;
  est.value = integrate_once(f, spec, spec.nodes_per_dim);
  const double coarse = integrate_once(f, spec, std::max(2, spec.nodes_per_dim / 2));
  est.refine_delta = (std::isinf(est.value) || std::isinf(coarse))
                         ? kInf
                         : std::abs(est.value - coarse);
  return est;
}

Estimate mc_expect(const NumericFn& f, const symlin::SymMatrix& covariance, const McSpec& spec) {
  if (spec.batches < 2) fail(ErrorCode::InvalidInput, "need at least two batches");
  if (spec.samples < spec.batches) fail(ErrorCode::InvalidInput, "samples < batches");
  const int dim = covariance.dim();
  const symlin::EigDecomposition eig = symlin::eig_sym(covariance);
  const double lmax = std::max(eig.eigenvalues(0), 0.0);
  if (eig.eigenvalues(dim - 1) < -1e-10 * std::max(1.0, lmax))
    fail(ErrorCode::NotPsd, "covariance must be PSD");
  Eigen::MatrixXd factor = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j)
    if (eig.eigenvalues(j) > 0)
      factor.col(j) = std::sqrt(eig.eigenvalues(j)) * eig.eigenvectors.col(j);

  NormalSource rng(spec.seed);
  const std::int64_t per_batch = spec.samples / spec.batches;
  std::vector<double> batch_means(spec.batches);
  VectorXd z(dim), x(dim);
  for (int b = 0; b < spec.batches; ++b) {
    long double acc = 0.0L;
    for (std::int64_t s = 0; s < per_batch; ++s) {
      for (int d = 0; d < dim; ++d) z(d) = rng.next();
      x.noalias() = factor * z;
      const double v = f(x);
      if (std::isnan(v)) fail(ErrorCode::IntegrandError, "integrand returned NaN");
      acc += v;
    }
    batch_means[b] = static_cast<double>(acc / per_batch);
  }
  long double mean = 0.0L;
  for (double m : batch_means) mean += m;
  mean /= spec.batches;
  long double var = 0.0L;
  for (double m : batch_means) var += (m - mean) * (m - mean);
  var /= (spec.batches - 1);

  Estimate est;
  est.value = static_cast<double>(mean);
  est.std_error = std::sqrt(static_cast<double>(var) / spec.batches);
  return est;
}

double lp_norm(const NumericFn& f, const QuadratureSpec& spec, double p) {
  // (int f^p)^(1/p) is unstable near p = 0; the limit is the geometric mean.
  if (std::abs(p) < 1e-6) {
    NumericFn logf = make_fn(f.dim, [&f](const VectorXd& x) {
      const double v = f(x);
      if (!(v > 0)) fail(ErrorCode::IntegrandError, "geometric mean needs a positive integrand");
      return std::log(v);
    });
    return std::exp(integrate(logf, spec).value);
  }
  NumericFn fp = make_fn(f.dim, [&f, p](const VectorXd& x) {
    const double v = f(x);
    if (v < 0 && p != std::floor(p)) fail(ErrorCode::IntegrandError, "negative base");
    return ext_pow(std::abs(v), p);
  });
  const double integral = integrate(fp, spec).value;
  return ext_pow(integral, 1.0 / p);
}

NormalSource::NormalSource(std::uint64_t seed) {
  // splitmix64 expansion of the seed into xoshiro256++ state.
  std::uint64_t x = seed;
  for (auto& s : state_) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    s = z ^ (z >> 31);
  }
}

double NormalSource::uniform() {
  auto rotl = [](std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); };
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  // (0, 1]: never returns 0 so log() below is safe.
  return (static_cast<double>(result >> 11) + 1.0) * 0x1.0p-53;
}

double NormalSource::next() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

}  // namespace gholder::numint
