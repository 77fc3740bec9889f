#ifndef GHOLDER_CONFIG_HPP
#define GHOLDER_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gholder/core.hpp"
#include "gholder/gauss.hpp"
#include "gholder/symlin.hpp"

namespace gholder::cli {

using nlohmann::json;

/// Declarative function spec from a config file. Exponential-family entries also
/// expose their closed form; the rest evaluate numerically only.
struct FunctionSpec {
  enum class Kind { ExpLinear, Gaussian, IndicatorBox, RationalBump };
  Kind kind = Kind::RationalBump;
  int dim = 1;
  double scale = 1.0;
  VectorXd linear;
  Eigen::MatrixXd quad;
  Eigen::MatrixXd bounds;  // dim x 2 for indicator_box

  NumericFn to_numeric() const;
  std::optional<gauss::QuadExpFunction> to_quadexp() const;

  static FunctionSpec parse(const json& j);
};

struct MethodSpec {
  enum class Kind { ClosedForm, Quadrature, Mc };
  Kind kind = Kind::Quadrature;
  int nodes = 64;
  std::int64_t samples = 1'000'000;
  std::uint64_t seed = 0;
  bool seed_given = false;

  static MethodSpec parse(const json& j);
};

/// Parse with 1e-9 asymmetry tolerance, then symmetrize.
symlin::SymMatrix parse_sym_matrix(const json& j);
symlin::RectMatrix parse_rect_matrix(const json& j);
VectorXd parse_vector(const json& j);

/// Parse a JSON document, mapping syntax errors to InvalidInput with line/column.
json parse_config_text(const std::string& text);

}  // namespace gholder::cli

#endif
