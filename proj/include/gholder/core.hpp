#ifndef GHOLDER_CORE_HPP
#define GHOLDER_CORE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace gholder {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Error codes shared by all engines. Every thrown gholder::Error carries one.
enum class ErrorCode {
  InvalidInput,
  NotPsd,
  NotIsometry,
  SingularBlock,
  NotConjugate,
  Degenerate,
  DegenerateExponent,
  NotEligible,
  NoWitness,
  NotApplicable,
  AssumptionFailed,
  InvalidExponent,
  IntegrandError,
  NotDensity,
  NormalizationFailed,
  HypothesisFailed,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::NotIsometry: return "NotIsometry";
    case ErrorCode::SingularBlock: return "SingularBlock";
    case ErrorCode::NotConjugate: return "NotConjugate";
    case ErrorCode::Degenerate: return "Degenerate";
    case ErrorCode::DegenerateExponent: return "DegenerateExponent";
    case ErrorCode::NotEligible: return "NotEligible";
    case ErrorCode::NoWitness: return "NoWitness";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::AssumptionFailed: return "AssumptionFailed";
    case ErrorCode::InvalidExponent: return "InvalidExponent";
    case ErrorCode::IntegrandError: return "IntegrandError";
    case ErrorCode::NotDensity: return "NotDensity";
    case ErrorCode::NormalizationFailed: return "NormalizationFailed";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Product with the extended-real convention inf*0 = 0 (applied in either order).
inline double ext_mul(double a, double b) {
  if ((std::isinf(a) && b == 0.0) || (a == 0.0 && std::isinf(b))) return 0.0;
  return a * b;
}

/// x^e on [0,inf] with the conventions inf^neg = 0, 0^neg = inf, inf^0 = 1.
inline double ext_pow(double x, double e) {
  if (e == 0.0) return 1.0;
  if (std::isinf(x)) return e > 0 ? kInf : 0.0;
  if (x == 0.0) return e > 0 ? 0.0 : kInf;
  return std::pow(x, e);
}

/// Generic real-valued integrand on R^dim.
struct NumericFn {
  int dim = 1;
  std::function<double(const VectorXd&)> f;
  double operator()(const VectorXd& x) const { return f(x); }
};

inline NumericFn make_fn(int dim, std::function<double(const VectorXd&)> f) {
  return NumericFn{dim, std::move(f)};
}

inline bool approx_eq(double a, double b, double rtol, double atol = 0.0) {
  return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
}

}  // namespace gholder

#endif
