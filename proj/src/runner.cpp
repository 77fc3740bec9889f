#include "gholder/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gholder/barthe.hpp"
#include "gholder/holder.hpp"
#include "gholder/hyper.hpp"
#include "gholder/lebesgue.hpp"
#include "gholder/numint.hpp"

namespace gholder::cli {

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kRegionBoundaryNote =
    "boundary characterization: (1/c1 - 1)(1/c2 - 1) = t^2, equivalently "
    "(p1 - 1)(p2 - 1) = t^2; the variant with an extra p1*p2 factor is inconsistent "
    "with the operator-norm boundary and is not used";
constexpr const char* kGammaNormalizationNote =
    "two-sided constant uses the rho^{-(N-n)/(2 rho)} normalization; the variant with "
    "rho^{-n/rho} fails the exact Gaussian equality case and is rejected";

json eig_to_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

double get_tol(const json& config, const Overrides& ov) {
  if (ov.tol) return *ov.tol;
  return config.value("tol", symlin::kDefaultPsdTol);
}

std::vector<FunctionSpec> parse_functions(const json& config) {
  std::vector<FunctionSpec> fs;
  if (!config.contains("functions")) return fs;
  for (const auto& j : config.at("functions")) fs.push_back(FunctionSpec::parse(j));
  return fs;
}

MethodSpec parse_method(const json& config, const Overrides& ov) {
  MethodSpec method = MethodSpec::parse(config.value("method", json()));
  if (ov.seed) method.seed = *ov.seed;
  return method;
}

gauss::GaussianInstance parse_instance(const json& config) {
  gauss::GaussianInstance instance;
  for (const auto& s : config.at("blocks")) instance.blocks.sizes.push_back(s.get<int>());
  instance.T = parse_sym_matrix(config.at("T"));
  instance.p = config.at("p").get<std::vector<double>>();
  instance.validate();
  return instance;
}

// ---------------------------------------------------------------------------
// theorem1
// ---------------------------------------------------------------------------

json run_theorem1(const json& config, const Overrides& ov) {
  const gauss::GaussianInstance instance = parse_instance(config);
  const double tol = get_tol(config, ov);
  const holder::CriterionVerdict verdict = holder::classify(instance, tol);

  json results;
  results["direction"] = verdict.direction_name();
  results["upper_holds"] = verdict.upper_holds;
  results["lower_holds"] = verdict.lower_holds;
  results["strict_upper"] = verdict.strict_upper;
  results["strict_lower"] = verdict.strict_lower;
  results["kernel_dimension"] = verdict.kernel_basis.size();
  results["min_eig_P_minus_T"] = verdict.min_eig_P_minus_T;
  results["min_eig_T_minus_P"] = verdict.min_eig_T_minus_P;

  if (!verdict.kernel_basis.empty()) {
    json witnesses = json::array();
    for (const auto& tuple : holder::equality_witness(instance)) {
      json w;
      VectorXd alpha(instance.T.dim());
      int off = 0;
      for (const auto& f : tuple) {
        alpha.segment(off, f.dim) = f.linear;
        off += f.dim;
      }
      w["alpha"] = eig_to_json(alpha);
      w["lhs"] = gauss::product_expectation_closed(instance, tuple);
      w["rhs"] = gauss::holder_rhs_exponential(instance, alpha);
      witnesses.push_back(w);
    }
    results["equality_witnesses"] = witnesses;
  }

  bool violation = false;
  const std::vector<FunctionSpec> fs = parse_functions(config);
  if (!fs.empty()) {
    if (static_cast<int>(fs.size()) != instance.blocks.count())
      fail(ErrorCode::InvalidInput, "one function per block required");
    const MethodSpec method = parse_method(config, ov);
    double lhs = 0.0, rhs = 1.0, slack = 0.0;

    if (method.kind == MethodSpec::Kind::ClosedForm) {
      std::vector<gauss::QuadExpFunction> qfs;
      for (const auto& f : fs) {
        const auto qf = f.to_quadexp();
        if (!qf) fail(ErrorCode::InvalidInput, "closed form needs exponential-family functions");
        qfs.push_back(*qf);
      }
      lhs = gauss::product_expectation_closed(instance, qfs);
      for (int i = 0; i < instance.blocks.count(); ++i)
        rhs = ext_mul(rhs,
                      gauss::gaussian_lp_norm(qfs[i], instance.diag_block(i), instance.p[i]).value);
      slack = 1e-10 * std::max(std::abs(lhs), std::abs(rhs));
    } else if (method.kind == MethodSpec::Kind::Quadrature) {
      std::vector<NumericFn> nfs;
      for (const auto& f : fs) nfs.push_back(f.to_numeric());
      numint::QuadratureSpec spec;
      spec.nodes_per_dim = method.nodes;
      spec.dims = instance.T.dim();
      spec.weight = numint::GaussianCov{instance.T};
      NumericFn product = make_fn(spec.dims, [&](const VectorXd& x) {
        double acc = 1.0;
        for (int i = 0; i < instance.blocks.count(); ++i)
          acc *= nfs[i](x.segment(instance.blocks.offset(i), instance.blocks.sizes[i]));
        return acc;
      });
      lhs = numint::integrate(product, spec).value;
      for (int i = 0; i < instance.blocks.count(); ++i) {
        numint::QuadratureSpec bspec;
        bspec.nodes_per_dim = method.nodes;
        bspec.dims = instance.blocks.sizes[i];
        bspec.weight = numint::GaussianCov{instance.diag_block(i)};
        rhs = ext_mul(rhs, numint::lp_norm(nfs[i], bspec, instance.p[i]));
      }
      slack = 1e-7 * std::max(std::abs(lhs), std::abs(rhs));
    } else {
      std::vector<NumericFn> nfs;
      for (const auto& f : fs) nfs.push_back(f.to_numeric());
      numint::McSpec mc;
      mc.samples = method.samples;
      mc.seed = method.seed;
      NumericFn product = make_fn(instance.T.dim(), [&](const VectorXd& x) {
        double acc = 1.0;
        for (int i = 0; i < instance.blocks.count(); ++i)
          acc *= nfs[i](x.segment(instance.blocks.offset(i), instance.blocks.sizes[i]));
        return acc;
      });
      const numint::Estimate est = numint::mc_expect(product, instance.T, mc);
      lhs = est.value;
      double rel_err = 0.0;
      for (int i = 0; i < instance.blocks.count(); ++i) {
        NumericFn fp = make_fn(instance.blocks.sizes[i], [&, i](const VectorXd& x) {
          return std::pow(nfs[i](x), instance.p[i]);
        });
        numint::McSpec bm = mc;
        bm.seed = mc.seed + 1 + i;
        const numint::Estimate bi = numint::mc_expect(fp, instance.diag_block(i), bm);
        rhs = ext_mul(rhs, ext_pow(bi.value, 1.0 / instance.p[i]));
        if (bi.value > 0 && bi.std_error)
          rel_err += *bi.std_error / (std::abs(instance.p[i]) * bi.value);
      }
      slack = 4.0 * (est.std_error.value_or(0.0) + rhs * rel_err);
      results["lhs_std_error"] = est.std_error.value_or(0.0);
    }

    results["lhs"] = lhs;
    results["rhs"] = rhs;
    results["slack"] = slack;
    results["method"] = method.kind == MethodSpec::Kind::ClosedForm ? "closed_form"
                        : method.kind == MethodSpec::Kind::Quadrature ? "quadrature"
                                                                      : "mc";
    if (verdict.upper_holds && lhs > rhs + slack) violation = true;
    if (verdict.lower_holds && lhs < rhs - slack) violation = true;
  }

  json report;
  report["results"] = results;
  report["verdict"] = violation ? "Violation" : (verdict.neither() ? "Info" : "Pass");
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// region
// ---------------------------------------------------------------------------

json run_region(const json& config, const Overrides&) {
  const double t = config.at("t").get<double>();
  const std::vector<double> c = config.at("c").get<std::vector<double>>();
  if (c.size() != 2) fail(ErrorCode::InvalidInput, "bivariate region check expects c = [c1, c2]");

  const holder::Frame frame = holder::Frame::bivariate(t);
  const double norm = holder::region_norm(frame, c);
  const bool member_norm = holder::region_membership({frame, c});
  const bool member_closed = holder::bivariate_region_contains(t, c[0], c[1]);

  json results;
  results["norm"] = norm;
  results["member_via_norm"] = member_norm;
  results["member_via_closed_form"] = member_closed;
  const bool boundary_band = std::abs(norm - 1.0) <= 1e-9;
  const bool agree = member_norm == member_closed || boundary_band;
  results["routes_agree"] = agree;
  results["membership_slack"] = 1e-10;
  results["boundary_band"] = 1e-9;
  if (c[0] > 0 || c[1] > 0) {
    results["boundary_scale"] = holder::boundary_scale(frame, c);
  }
  if (member_norm) {
    const holder::IdentityDecomposition decomp = holder::decompose_identity({frame, c});
    results["identity_extra_terms"] = decomp.extra_terms.size();
    const Eigen::MatrixXd recon = decomp.reconstruct(frame);
    results["identity_residual"] =
        (recon - Eigen::MatrixXd::Identity(recon.rows(), recon.cols())).norm();
  }

  json report;
  report["results"] = results;
  report["notes"] = json::array({kRegionBoundaryNote});
  report["verdict"] = agree ? "Pass" : "Violation";
  report["exit_code"] = agree ? 0 : 1;
  return report;
}

// ---------------------------------------------------------------------------
// hyper
// ---------------------------------------------------------------------------

json run_hyper(const json& config, const Overrides& ov) {
  hyper::HyperQuery query;
  query.p = config.at("p").get<double>();
  query.q = config.at("q").get<double>();
  query.t = config.at("t").get<double>();
  const std::string dir = config.value("direction", "forward");
  query.direction = dir == "reverse" ? hyper::Direction::Reverse : hyper::Direction::Forward;

  const bool condition = hyper::hyper_condition(query);
  const bool condition_matrix =
      hyper::hyper_condition_matrix(query, config.value("n", 1), get_tol(config, ov));

  json results;
  results["condition"] = condition;
  results["condition_matrix_route"] = condition_matrix;
  results["routes_agree"] = condition == condition_matrix;

  bool violation = condition != condition_matrix;
  const std::vector<FunctionSpec> fs = parse_functions(config);
  if (!fs.empty()) {
    const MethodSpec method = parse_method(config, ov);
    const hyper::HyperNumericReport rep =
        hyper::verify_hyper_numeric(fs[0].to_numeric(), query, method.nodes);
    results["semigroup_norm"] = rep.semigroup_norm;
    results["input_norm"] = rep.input_norm;
    results["mehler_direct"] = rep.mehler_direct;
    results["mehler_semigroup"] = rep.mehler_semigroup;
    results["mehler_consistent"] = rep.mehler_consistent;
    results["numeric_verdict"] = rep.verdict == hyper::NumericVerdict::Pass   ? "Pass"
                                 : rep.verdict == hyper::NumericVerdict::Fail ? "Fail"
                                                                              : "Inconclusive";
    results["numeric_rtol"] = 1e-8;
    if (condition && rep.verdict == hyper::NumericVerdict::Fail) violation = true;
    if (!rep.mehler_consistent) violation = true;
  }

  json report;
  report["results"] = results;
  report["verdict"] = violation ? "Violation" : (condition ? "Pass" : "Info");
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// lebesgue
// ---------------------------------------------------------------------------

lebesgue::FrameInstance parse_frame_instance(const json& config) {
  lebesgue::FrameInstance instance;
  for (const auto& u : config.at("U")) instance.U_list.push_back(parse_rect_matrix(u));
  instance.B = parse_sym_matrix(config.at("B"));
  instance.p = config.at("p").get<std::vector<double>>();
  instance.validate();
  return instance;
}

json run_lebesgue(const json& config, const Overrides& ov) {
  const lebesgue::FrameInstance instance = parse_frame_instance(config);

  json results;
  results["homogeneous"] = lebesgue::homogeneity_check(instance);
  const lebesgue::Direction direction = lebesgue::condition_check(instance, get_tol(config, ov));
  results["direction"] = lebesgue::direction_name(direction);
  results["constant"] = lebesgue::bl_constant(instance);
  const lebesgue::Lemma4Report lemma = lebesgue::lemma4_equivalences(instance);
  results["lemma4"] = {{"via_condition", lemma.via_condition},
                       {"via_inverse_identity", lemma.via_inverse_identity},
                       {"via_block_sum", lemma.via_block_sum},
                       {"consistent", lemma.consistent},
                       {"inverse_residual", lemma.inverse_residual},
                       {"block_sum_residual", lemma.block_sum_residual}};

  bool violation = false;
  const std::vector<FunctionSpec> fs = parse_functions(config);
  if (!fs.empty()) {
    const MethodSpec method = parse_method(config, ov);
    lebesgue::NumericReport rep;
    if (method.kind == MethodSpec::Kind::ClosedForm) {
      std::vector<gauss::QuadExpFunction> qfs;
      for (const auto& f : fs) {
        const auto qf = f.to_quadexp();
        if (!qf) fail(ErrorCode::InvalidInput, "closed form needs exponential-family functions");
        qfs.push_back(*qf);
      }
      rep = lebesgue::verify_lebesgue_closed(instance, qfs);
    } else {
      std::vector<NumericFn> nfs;
      for (const auto& f : fs) nfs.push_back(f.to_numeric());
      lebesgue::QuadOptions opts;
      opts.nodes_per_dim = method.nodes;
      rep = lebesgue::verify_lebesgue_numeric(instance, nfs, opts);
    }
    results["lhs"] = rep.lhs;
    results["rhs"] = rep.rhs;
    results["ratio"] = rep.ratio;
    results["inconclusive"] = rep.inconclusive;
    results["rtol"] = method.kind == MethodSpec::Kind::ClosedForm ? 1e-9 : 1e-6;
    violation = !rep.inconclusive && !rep.pass;
  }

  json report;
  report["results"] = results;
  report["verdict"] = violation ? "Violation" : "Pass";
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// young
// ---------------------------------------------------------------------------

json run_young(const json& config, const Overrides&) {
  lebesgue::YoungTriple triple;
  triple.p = config.at("p").get<double>();
  triple.q = config.at("q").get<double>();
  triple.r = config.at("r").get<double>();
  const int n = config.value("n", 1);

  const lebesgue::YoungData data = lebesgue::young_setup(triple, n);
  const double formula = data.constant;

  const double rc = triple.r / (triple.r - 1.0);
  const double qc = triple.q / (triple.q - 1.0);
  const double lambda = rc / qc;
  const double conv = barthe::conv_constants(lambda, triple.r, n);

  const lebesgue::FrameInstance& active =
      !data.upper.U_list.empty() ? data.upper : data.lower;
  const double det_route = lebesgue::bl_constant(active);

  json results;
  results["constant_formula"] = formula;
  results["constant_det_ratio"] = det_route;
  results["constant_conv_route"] = conv;
  const bool agree = approx_eq(formula, det_route, 1e-9) && approx_eq(formula, conv, 1e-9);
  results["routes_agree"] = agree;
  results["route_rtol"] = 1e-9;
  results["extremizer_rtol"] = 1e-6;

  bool violation = !agree;
  if (!data.upper.U_list.empty()) {
    const auto extremizers = lebesgue::extremizers_upper(data.upper);
    const lebesgue::NumericReport closed =
        lebesgue::verify_lebesgue_closed(data.upper, extremizers);
    results["extremizer_ratio"] = closed.ratio;
    if (std::abs(closed.ratio - 1.0) > 1e-6) violation = true;
  }

  json report;
  report["results"] = results;
  report["notes"] = json::array({kGammaNormalizationNote});
  report["verdict"] = violation ? "Violation" : "Pass";
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// barthe
// ---------------------------------------------------------------------------

barthe::BartheInstance parse_barthe_instance(const json& config) {
  std::vector<symlin::RectMatrix> U_list;
  for (const auto& u : config.at("U")) U_list.push_back(parse_rect_matrix(u));
  const symlin::SymMatrix A = parse_sym_matrix(config.at("A"));
  const std::vector<double> c = config.at("c").get<std::vector<double>>();
  std::optional<symlin::RectMatrix> W;
  if (config.contains("W")) W = parse_rect_matrix(config.at("W"));
  return barthe::validate_instance(U_list, A, c, W);
}

json run_barthe(const json& config, const Overrides& ov) {
  const barthe::BartheInstance instance = parse_barthe_instance(config);
  const double rho = config.at("rho").get<double>();

  json results;
  results["gamma_rho"] = barthe::gamma_rho(instance, rho);
  const barthe::RhoProfile profile = barthe::RhoProfile::make(instance.c, rho);
  results["profile_exponents"] = profile.p;

  std::vector<NumericFn> fs;
  const std::vector<FunctionSpec> specs = parse_functions(config);
  if (!specs.empty()) {
    for (const auto& s : specs) fs.push_back(s.to_numeric());
  } else {
    for (int i = 0; i < instance.count(); ++i) {
      const Eigen::MatrixXd Ainv = instance.A_blocks[i].mat().inverse();
      const double ci = instance.c[i];
      fs.push_back(make_fn(instance.block_sizes[i], [Ainv, ci](const VectorXd& x) {
        return std::exp(-ci * x.dot(Ainv * x));
      }));
    }
  }
  const MethodSpec method = parse_method(config, ov);
  barthe::TwoSidedOptions opts;
  opts.nodes_per_dim = method.kind == MethodSpec::Kind::Quadrature ? method.nodes : 64;
  const barthe::TwoSidedReport rep = barthe::verify_two_sided(instance, fs, rho, opts);
  results["G1"] = rep.G1;
  results["G2"] = rep.G2;
  results["G3"] = rep.G3;
  results["chain_holds"] = rep.chain_holds;
  results["inconclusive"] = rep.inconclusive;
  results["rtol"] = 1e-6;

  const bool violation = !rep.inconclusive && !rep.chain_holds;
  json report;
  report["results"] = results;
  report["notes"] = json::array({kGammaNormalizationNote});
  report["verdict"] = violation ? "Violation" : (rep.inconclusive ? "Info" : "Pass");
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

// ---------------------------------------------------------------------------
// prekopa
// ---------------------------------------------------------------------------

json run_prekopa(const json& config, const Overrides&) {
  const double lambda = config.at("lambda").get<double>();
  const std::vector<FunctionSpec> fs = parse_functions(config);
  if (fs.size() != 3) fail(ErrorCode::InvalidInput, "prekopa expects functions [f, g, h]");

  barthe::PrekopaOptions opts;
  if (config.contains("box_halfwidth"))
    opts.box_halfwidth = config.at("box_halfwidth").get<double>();
  const barthe::PrekopaReport rep = barthe::prekopa_leindler_check(
      fs[0].to_numeric(), fs[1].to_numeric(), fs[2].to_numeric(), lambda, opts);

  json results;
  results["int_f"] = rep.int_f;
  results["int_g"] = rep.int_g;
  results["int_h"] = rep.int_h;
  results["rhs"] = rep.rhs;
  results["pass"] = rep.pass;
  results["rtol"] = 1e-6;

  json report;
  report["results"] = results;
  report["verdict"] = rep.pass ? "Pass" : "Violation";
  report["exit_code"] = rep.pass ? 0 : 1;
  return report;
}

// ---------------------------------------------------------------------------
// entropy
// ---------------------------------------------------------------------------

json run_entropy(const json& config, const Overrides&) {
  json results;
  bool violation = false;
  if (config.contains("U")) {
    const barthe::BartheInstance instance = parse_barthe_instance(config);
    std::vector<NumericFn> gs;
    for (const auto& s : parse_functions(config)) gs.push_back(s.to_numeric());
    barthe::EntropyOptions opts;
    if (config.contains("box_halfwidth"))
      opts.box_halfwidth = config.at("box_halfwidth").get<double>();
    const barthe::EntropyReport rep = barthe::entropy_inequality_check(instance, gs, opts);
    results["lhs"] = rep.lhs;
    results["middle"] = rep.middle;
    results["rhs"] = rep.rhs;
    results["D1"] = rep.D1;
    results["D2"] = rep.D2;
    results["chain_holds"] = rep.chain_holds;
    results["g2_derivative_fd"] = rep.g2_derivative_fd;
    results["g2_derivative_closed"] = rep.g2_derivative_closed;
    results["chain_tolerance"] = 1e-5;
    violation = !rep.chain_holds;
  } else {
    const std::vector<FunctionSpec> fs = parse_functions(config);
    if (fs.size() != 1) fail(ErrorCode::InvalidInput, "entropy expects a single density");
    results["entropy"] = barthe::entropy(fs[0].to_numeric());
  }

  json report;
  report["results"] = results;
  report["verdict"] = violation ? "Violation" : "Pass";
  report["exit_code"] = violation ? 1 : 0;
  return report;
}

}  // namespace

json run_check_json(const json& config, const Overrides& overrides) {
  json report;
  report["tool"] = {{"name", "gholder"}, {"version", kVersion}};
  report["input"] = config;
  try {
    if (!config.is_object() || !config.contains("kind"))
      fail(ErrorCode::InvalidInput, "config needs a kind");
    const std::string kind = config.at("kind").get<std::string>();
    report["kind"] = kind;

    json body;
    if (kind == "theorem1") {
      body = run_theorem1(config, overrides);
    } else if (kind == "region") {
      body = run_region(config, overrides);
    } else if (kind == "hyper") {
      body = run_hyper(config, overrides);
    } else if (kind == "lebesgue") {
      body = run_lebesgue(config, overrides);
    } else if (kind == "young") {
      body = run_young(config, overrides);
    } else if (kind == "barthe") {
      body = run_barthe(config, overrides);
    } else if (kind == "prekopa") {
      body = run_prekopa(config, overrides);
    } else if (kind == "entropy") {
      body = run_entropy(config, overrides);
    } else {
      fail(ErrorCode::InvalidInput, "unknown kind '" + kind + "'");
    }
    for (auto& [key, value] : body.items()) report[key] = value;
  } catch (const Error& e) {
    report["verdict"] = "Invalid";
    report["error"] = e.what();
    report["exit_code"] = 2;
  } catch (const json::exception& e) {
    report["verdict"] = "Invalid";
    report["error"] = std::string("config field error: ") + e.what();
    report["exit_code"] = 2;
  }
  return report;
}

int run_check_file(const std::string& config_path, const std::string& out_path,
                   const Overrides& overrides) {
  json report;
  try {
    std::ifstream in(config_path);
    if (!in) fail(ErrorCode::InvalidInput, "cannot open config '" + config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    report = run_check_json(parse_config_text(buffer.str()), overrides);
  } catch (const Error& e) {
    report["verdict"] = "Invalid";
    report["error"] = e.what();
    report["exit_code"] = 2;
  }

  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  if (!overrides.quiet && !out_path.empty())
    std::cerr << config_path << ": " << report.value("verdict", "?") << "\n";
  return report.value("exit_code", 2);
}

std::string emit_region_plotdata(double t, int grid) {
  if (grid < 2) fail(ErrorCode::InvalidInput, "grid must be >= 2");
  const holder::Frame frame = holder::Frame::bivariate(t);
  std::string out = "c1,c2,norm,member\n";
  char line[128];
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double c1 = static_cast<double>(i) / (grid - 1);
      const double c2 = static_cast<double>(j) / (grid - 1);
      const double norm = holder::region_norm(frame, {c1, c2});
      const bool member = norm <= 1.0 + 1e-10;
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%s\n", c1, c2, norm,
                    member ? "true" : "false");
      out += line;
    }
  }
  return out;
}

}  // namespace gholder::cli
