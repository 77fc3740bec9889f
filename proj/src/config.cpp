#include "gholder/config.hpp"

namespace gholder::cli {

NumericFn FunctionSpec::to_numeric() const {
  switch (kind) {
    case Kind::ExpLinear: {
      const VectorXd a = linear;
      return make_fn(dim, [a](const VectorXd& x) { return std::exp(a.dot(x)); });
    }
    case Kind::Gaussian: {
      const gauss::QuadExpFunction f = *to_quadexp();
      return make_fn(dim, [f](const VectorXd& x) { return f.eval(x); });
    }
    case Kind::IndicatorBox: {
      const Eigen::MatrixXd b = bounds;
      return make_fn(dim, [b](const VectorXd& x) {
        for (int d = 0; d < x.size(); ++d)
          if (x(d) < b(d, 0) || x(d) > b(d, 1)) return 0.0;
        return 1.0;
      });
    }
    case Kind::RationalBump:
      return make_fn(dim, [](const VectorXd& x) { return 1.0 / (1.0 + x.squaredNorm()); });
  }
  fail(ErrorCode::InvalidInput, "unknown function kind");
}

std::optional<gauss::QuadExpFunction> FunctionSpec::to_quadexp() const {
  if (kind == Kind::ExpLinear) return gauss::QuadExpFunction::exp_linear(linear);
  if (kind == Kind::Gaussian) {
    gauss::QuadExpFunction f;
    f.dim = dim;
    f.scale = scale;
    f.linear = linear;
    f.quad = symlin::SymMatrix(quad);
    return f;
  }
  return std::nullopt;
}

FunctionSpec FunctionSpec::parse(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    fail(ErrorCode::InvalidInput, "function spec needs a type");
  FunctionSpec spec;
  const std::string type = j.at("type").get<std::string>();
  if (type == "exp_linear") {
    spec.kind = Kind::ExpLinear;
    spec.linear = parse_vector(j.at("alpha"));
    spec.dim = static_cast<int>(spec.linear.size());
  } else if (type == "gaussian") {
    spec.kind = Kind::Gaussian;
    spec.scale = j.value("scale", 1.0);
    spec.linear = parse_vector(j.at("linear"));
    spec.dim = static_cast<int>(spec.linear.size());
    spec.quad = parse_sym_matrix(j.at("quad")).mat();
    if (spec.quad.rows() != spec.dim) fail(ErrorCode::InvalidInput, "gaussian shape mismatch");
    if (!(spec.scale > 0)) fail(ErrorCode::InvalidInput, "gaussian scale must be positive");
  } else if (type == "indicator_box") {
    spec.kind = Kind::IndicatorBox;
    const auto& b = j.at("bounds");
    if (!b.is_array() || b.empty()) fail(ErrorCode::InvalidInput, "indicator bounds required");
    spec.dim = static_cast<int>(b.size());
    spec.bounds.resize(spec.dim, 2);
    for (int d = 0; d < spec.dim; ++d) {
      if (!b[d].is_array() || b[d].size() != 2)
        fail(ErrorCode::InvalidInput, "each bound must be [lo, hi]");
      spec.bounds(d, 0) = b[d][0].get<double>();
      spec.bounds(d, 1) = b[d][1].get<double>();
      if (!(spec.bounds(d, 0) < spec.bounds(d, 1)))
        fail(ErrorCode::InvalidInput, "bounds must satisfy lo < hi");
    }
  } else if (type == "rational_bump") {
    spec.kind = Kind::RationalBump;
    spec.dim = j.value("dim", 1);
  } else {
    fail(ErrorCode::InvalidInput, "unknown function type '" + type + "'");
  }
  return spec;
}

MethodSpec MethodSpec::parse(const json& j) {
  MethodSpec spec;
  if (j.is_null()) return spec;
  const std::string type = j.value("type", "quadrature");
  if (type == "closed_form") {
    spec.kind = MethodSpec::Kind::ClosedForm;
  } else if (type == "quadrature") {
    spec.kind = MethodSpec::Kind::Quadrature;
    spec.nodes = j.value("nodes", 64);
    if (spec.nodes < 2) fail(ErrorCode::InvalidInput, "quadrature nodes must be >= 2");
  } else if (type == "mc") {
    spec.kind = MethodSpec::Kind::Mc;
    spec.samples = j.value("samples", std::int64_t{1'000'000});
    if (!j.contains("seed"))
      fail(ErrorCode::InvalidInput, "mc method requires an explicit seed");
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.seed_given = true;
  } else {
    fail(ErrorCode::InvalidInput, "unknown method '" + type + "'");
  }
  return spec;
}

VectorXd parse_vector(const json& j) {
  if (!j.is_array() || j.empty()) fail(ErrorCode::InvalidInput, "expected a numeric array");
  VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(ErrorCode::InvalidInput, "expected a numeric array");
    v(i) = j[i].get<double>();
  }
  return v;
}

symlin::RectMatrix parse_rect_matrix(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    fail(ErrorCode::InvalidInput, "expected an array of rows");
  const size_t rows = j.size(), cols = j[0].size();
  symlin::RectMatrix m(rows, cols);
  for (size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      fail(ErrorCode::InvalidInput, "ragged matrix rows");
    for (size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

symlin::SymMatrix parse_sym_matrix(const json& j) {
  const symlin::RectMatrix m = parse_rect_matrix(j);
  if (m.rows() != m.cols()) fail(ErrorCode::InvalidInput, "matrix must be square");
  if ((m - m.transpose()).norm() > 1e-9 * std::max(1.0, m.norm()))
    fail(ErrorCode::InvalidInput, "matrix is asymmetric beyond tolerance");
  return symlin::SymMatrix(m);
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset -> line and column for the diagnostic.
    size_t line = 1, col = 1;
    const size_t limit = std::min(text.size(), e.byte > 0 ? e.byte - 1 : 0);
    for (size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::InvalidInput, "config parse error at line " + std::to_string(line) +
                                      ", column " + std::to_string(col) + ": " + e.what());
  }
}

}  // namespace gholder::cli
