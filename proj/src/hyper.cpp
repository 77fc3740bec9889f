#include "gholder/hyper.hpp"

#include <cmath>

#include "gholder/numint.hpp"

namespace gholder::hyper {

namespace {

double conjugate(double r) { return r / (r - 1.0); }

}  // namespace

void HyperQuery::validate() const {
  if (t < 0) fail(ErrorCode::InvalidInput, "semigroup time must be nonnegative");
  if (p == 1.0 || q == 1.0) fail(ErrorCode::DegenerateExponent, "exponent 1 is rejected");
  if (direction == Direction::Forward && !(p > 1 && q > 1))
    fail(ErrorCode::InvalidInput, "forward direction needs p, q > 1");
  if (direction == Direction::Reverse && !(p < 1 && q < 1))
    fail(ErrorCode::InvalidInput, "reverse direction needs p, q < 1");
}

double ou_apply(const NumericFn& f, const OuParams& params, const VectorXd& x, int quad_nodes) {
  if (quad_nodes < 2) fail(ErrorCode::InvalidInput, "quad_nodes must be >= 2");
  if (params.t < 0) fail(ErrorCode::InvalidInput, "semigroup time must be nonnegative");
  if (x.size() != params.dim) fail(ErrorCode::InvalidInput, "point dimension mismatch");
  const double decay = std::exp(-params.t);
  const double diffuse = std::sqrt(std::max(0.0, 1.0 - decay * decay));
  NumericFn shifted = make_fn(params.dim, [&](const VectorXd& y) {
    const double v = f(decay * x + diffuse * y);
    if (!std::isfinite(v)) fail(ErrorCode::IntegrandError, "integrand is not finite");
    return v;
  });
  numint::QuadratureSpec spec;
  spec.nodes_per_dim = quad_nodes;
  spec.dims = params.dim;
  return numint::integrate(shifted, spec).value;
}

bool hyper_condition(const HyperQuery& query) {
  query.validate();
  const double threshold = std::exp(-2.0 * query.t);
  if (query.direction == Direction::Forward) return (query.p - 1.0) / (query.q - 1.0) >= threshold;
  return (1.0 - query.p) / (1.0 - query.q) >= threshold;
}

bool hyper_condition_matrix(const HyperQuery& query, int n, double psd_tol) {
  query.validate();
  const double rho = std::exp(-query.t);
  const int N = 2 * n;
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(N, N);
  T.block(0, n, n, n) = rho * Eigen::MatrixXd::Identity(n, n);
  T.block(n, 0, n, n) = rho * Eigen::MatrixXd::Identity(n, n);

  gauss::GaussianInstance instance;
  instance.blocks.sizes = {n, n};
  instance.T = symlin::SymMatrix(T);
  instance.p = {conjugate(query.q), query.p};

  const holder::CriterionVerdict v = holder::classify(instance, psd_tol);
  return query.direction == Direction::Forward ? v.upper_holds : v.lower_holds;
}

HyperNumericReport verify_hyper_numeric(const NumericFn& f, const HyperQuery& query,
                                        int quad_nodes) {
  query.validate();
  const int d = f.dim;
  const OuParams params{query.t, d};

  NumericFn ptf = make_fn(d, [&](const VectorXd& x) { return ou_apply(f, params, x, quad_nodes); });

  numint::QuadratureSpec spec;
  spec.nodes_per_dim = quad_nodes;
  spec.dims = d;

  HyperNumericReport rep;
  rep.semigroup_norm = numint::lp_norm(ptf, spec, query.q);
  rep.input_norm = numint::lp_norm(f, spec, query.p);

  if (!std::isfinite(rep.semigroup_norm) || !std::isfinite(rep.input_norm)) {
    rep.verdict = NumericVerdict::Inconclusive;
  } else if (query.direction == Direction::Forward) {
    rep.verdict = rep.semigroup_norm <= rep.input_norm * (1.0 + 1e-8) ? NumericVerdict::Pass
                                                                      : NumericVerdict::Fail;
  } else {
    rep.verdict = rep.semigroup_norm >= rep.input_norm * (1.0 - 1e-8) ? NumericVerdict::Pass
                                                                      : NumericVerdict::Fail;
  }

  // E g(X) f(Y) over the e^{-t}-correlated pair vs E g(X) P_t f(X), with g = f.
  const double decay = std::exp(-query.t);
  const double diffuse = std::sqrt(std::max(0.0, 1.0 - decay * decay));
  NumericFn pair = make_fn(2 * d, [&](const VectorXd& xz) {
    const VectorXd x = xz.head(d);
    const VectorXd z = xz.tail(d);
    return f(x) * f(decay * x + diffuse * z);
  });
  numint::QuadratureSpec pair_spec;
  pair_spec.nodes_per_dim = quad_nodes;
  pair_spec.dims = 2 * d;
  rep.mehler_direct = numint::integrate(pair, pair_spec).value;

  NumericFn semi = make_fn(d, [&](const VectorXd& x) { return f(x) * ptf(x); });
  rep.mehler_semigroup = numint::integrate(semi, spec).value;
  rep.mehler_consistent =
      approx_eq(rep.mehler_direct, rep.mehler_semigroup, 1e-8, 1e-10);
  return rep;
}

MonotonicityReport ou_product_monotonicity(const holder::Frame& frame,
                                           const std::vector<double>& d,
                                           const std::vector<NumericFn>& fs,
                                           const std::vector<double>& t_grid, int quad_nodes,
                                           double rtol) {
  frame.validate();
  const int n = frame.ambient_dim();
  if (n > 2) fail(ErrorCode::InvalidInput, "nested quadrature is capped at ambient dimension 2");
  if (fs.size() != frame.blocks.size() || d.size() != frame.blocks.size())
    fail(ErrorCode::InvalidInput, "need one function and one weight per block");

  MonotonicityReport rep;
  {
    holder::GeometricCheck gc = holder::geometric_condition_check(frame, d, 0, 0);
    rep.matrix_le = gc.le_holds;
    rep.matrix_ge = gc.ge_holds;
  }

  numint::QuadratureSpec outer;
  outer.nodes_per_dim = quad_nodes;
  outer.dims = n;
  for (double t : t_grid) {
    NumericFn integrand = make_fn(n, [&](const VectorXd& x) {
      double log_prod = 0.0;
      for (size_t i = 0; i < fs.size(); ++i) {
        const OuParams params{t, static_cast<int>(frame.blocks[i].rows())};
        const double v = ou_apply(fs[i], params, frame.blocks[i] * x, quad_nodes);
        if (!(v > 0)) fail(ErrorCode::IntegrandError, "semigroup value must stay positive");
        log_prod += d[i] * std::log(v);
      }
      return std::exp(log_prod);
    });
    rep.times.push_back(t);
    rep.values.push_back(numint::integrate(integrand, outer).value);
  }

  rep.nondecreasing = rep.nonincreasing = true;
  for (size_t k = 0; k + 1 < rep.values.size(); ++k) {
    const double slack = rtol * std::max(std::abs(rep.values[k]), std::abs(rep.values[k + 1]));
    if (rep.values[k + 1] < rep.values[k] - slack) rep.nondecreasing = false;
    if (rep.values[k + 1] > rep.values[k] + slack) rep.nonincreasing = false;
  }
  rep.pass = (!rep.matrix_le || rep.nondecreasing) && (!rep.matrix_ge || rep.nonincreasing);
  return rep;
}

}  // namespace gholder::hyper
