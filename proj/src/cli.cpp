#include "solvpinch/cli.hpp"

#include "solvpinch/almost_abelian.hpp"
#include "solvpinch/json_io.hpp"
#include "solvpinch/lie_algebra.hpp"
#include "solvpinch/soliton_search.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

namespace solvpinch {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitFlat = 3;
constexpr int kExitStrict = 4;

std::string to_string(GlobalCriticality v) {
  switch (v) {
    case GlobalCriticality::Einstein: return "einstein";
    case GlobalCriticality::UnimodularNormal: return "unimodular-normal";
    case GlobalCriticality::NotCritical: return "not-critical";
  }
  return "?";
}

std::string to_string(SolvsolitonKind v) {
  switch (v) {
    case SolvsolitonKind::Normal: return "normal";
    case SolvsolitonKind::Nilsoliton: return "nilsoliton";
    case SolvsolitonKind::NotSolvsoliton: return "not-solvsoliton";
  }
  return "?";
}

std::string to_string(LocalMaxVerdict v) {
  switch (v) {
    case LocalMaxVerdict::MaxCandidate: return "max-candidate";
    case LocalMaxVerdict::Saddle: return "saddle";
    case LocalMaxVerdict::Degenerate: return "degenerate";
  }
  return "?";
}

std::string to_string(const TypeVerdict& v) {
  std::string base;
  switch (v.kind) {
    case TypeKind::Nilpotent: base = "nilpotent"; break;
    case TypeKind::RealType: base = "real"; break;
    case TypeKind::ImaginaryType: base = "imaginary"; break;
    case TypeKind::Mixed: base = "mixed"; break;
  }
  return v.heuristic ? base + " (heuristic)" : base;
}

std::string rational_tuple(const std::vector<double>& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ",";
    out += format_rational(nearest_rational(values[i], 120));
  }
  return out + ")";
}

struct Options {
  std::string matrix;
  std::string bracket;
  std::string family;
  std::optional<double> t;
  std::string t_range;
  int steps = 0;
  std::string method = "ascent";
  std::uint64_t seed = 0;
  bool strict = false;
  std::string out_path;
  std::string format = "table";
  std::string direction;
  std::string beta;
  int trials = 64;
  int n = 0;
  int m = 0;
  std::string rows;
  std::string config;
  double step = 0.1;
  double grad_tol = 1e-9;
  bool normalize = false;
  double tol = kDefaultTol;
};

// Writes to --out when given, else to the session stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw std::invalid_argument("cannot open output path: " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : fallback_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream& fallback_;
};

void kv(std::ostream& os, const std::string& key, const std::string& value) {
  os << key << ": " << value << "\n";
}

AAData load_matrix(const Options& opt) {
  if (opt.matrix.empty()) throw std::invalid_argument("this command needs --matrix");
  return AAData(parse_matrix(opt.matrix), opt.tol);
}

MetricLieAlgebra load_bracket(const Options& opt) {
  if (opt.bracket.empty()) throw std::invalid_argument("this command needs --bracket");
  MetricLieAlgebra mu = parse_bracket(opt.bracket, opt.tol);
  const BracketDiagnostics diag = validate_bracket(mu);
  if (!diag.pass)
    throw std::invalid_argument("input is not a Lie bracket: antisymmetry residual " +
                                fmt_double(diag.antisymmetry_residual, 6) + ", Jacobi residual " +
                                fmt_double(diag.jacobi_residual, 6));
  return mu;
}

// --config JSON provides base values; explicitly passed flags win.
FlowConfig flow_config(const Options& opt, int default_iters, const CLI::App* sub) {
  FlowConfig cfg;
  cfg.max_iter = default_iters;
  if (!opt.config.empty()) cfg = parse_flow_config(opt.config);
  auto passed = [&](const std::string& name) {
    const auto* o = sub->get_option_no_throw(name);
    return o != nullptr && o->count() > 0;
  };
  if (passed("--steps")) cfg.max_iter = opt.steps;
  if (passed("--step")) cfg.step = opt.step;
  if (passed("--grad-tol")) cfg.grad_tol = opt.grad_tol;
  if (passed("--seed")) cfg.seed = opt.seed;
  if (passed("--normalize"))
    cfg.normalization = opt.normalize ? FlowConfig::Normalization::UnitNorm
                                      : FlowConfig::Normalization::None;
  return cfg;
}

// --family accepts a bare name or a request object {"family": ..., "t": ...}.
std::pair<std::string, std::optional<double>> resolve_family(const Options& opt) {
  const auto first = opt.family.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && opt.family[first] == '{') {
    const FamilyRequest req = parse_family_request(opt.family);
    return {req.family, req.t};
  }
  return {opt.family, opt.t};
}

std::pair<double, double> parse_range(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("--t-range expects the form tmin:tmax");
  return {std::stod(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))};
}

int cmd_check(const Options& opt, std::ostream& out) {
  MetricLieAlgebra mu = parse_bracket(opt.bracket.empty() ? opt.matrix : opt.bracket, opt.tol);
  const BracketDiagnostics diag = validate_bracket(mu);
  kv(out, "antisymmetry_residual", fmt_double(diag.antisymmetry_residual, 6));
  kv(out, "jacobi_residual", fmt_double(diag.jacobi_residual, 6));
  kv(out, "valid", diag.pass ? "yes" : "no");
  if (!diag.pass) return kExitInvalid;
  const StructureFlags flags = structure_flags(mu);
  kv(out, "nilpotent", flags.nilpotent ? "yes" : "no");
  kv(out, "solvable", flags.solvable ? "yes" : "no");
  kv(out, "unimodular", flags.unimodular ? "yes" : "no");
  if (flags.rank_warning) kv(out, "rank_warning", "a rank decision was near the tolerance");
  kv(out, "type", to_string(classify_type(mu, 64, opt.seed)));
  return kExitOk;
}

int cmd_ricci(const Options& opt, std::ostream& out) {
  CurvatureData curv;
  if (!opt.bracket.empty()) {
    curv = ricci(load_bracket(opt));
  } else {
    curv = ricci_aa(load_matrix(opt));
  }
  kv(out, "ric", matrix_to_json(curv.ric));
  kv(out, "scal", fmt_double(curv.scal));
  kv(out, "ric_norm_sq", fmt_double(curv.ric_norm_sq));
  kv(out, "F", curv.F ? fmt_double(*curv.F) : "undefined (flat)");
  return kExitOk;
}

int cmd_pinch(const Options& opt, std::ostream& out) {
  std::optional<double> f;
  if (!opt.family.empty()) {
    const auto [name, t] = resolve_family(opt);
    if (!t) throw std::invalid_argument("pinch --family needs --t");
    f = F_aa(family(name, *t).aa);
  } else if (!opt.matrix.empty()) {
    f = F_aa(load_matrix(opt));
  } else {
    f = pinching_F(load_bracket(opt));
  }
  if (!f) throw FlatError("flat metric: F undefined");
  out << fmt_double(*f) << "\n";
  return kExitOk;
}

int cmd_grad(const Options& opt, std::ostream& out) {
  const AAData aa = load_matrix(opt);
  const GradCoefficients gc = grad_coefficients(aa);
  kv(out, "c1", fmt_double(gc.c1));
  kv(out, "c2", fmt_double(gc.c2));
  kv(out, "c3", fmt_double(gc.c3));
  kv(out, "c4", fmt_double(gc.c4));
  kv(out, "grad_F", matrix_to_json(grad_F(aa)));
  const OrbitGradient og = grad_F_orbit(aa);
  kv(out, "orbit_tangent", matrix_to_json(og.tangent));
  kv(out, "orbit_residual", fmt_double(og.residual));
  return kExitOk;
}

int cmd_critical(const Options& opt, std::ostream& out) {
  const AAData aa = load_matrix(opt);
  kv(out, "critical_residual", fmt_double(critical_residual(aa)));
  kv(out, "critical_residual_rel", fmt_double(critical_residual_rel(aa)));
  kv(out, "orbit_critical", orbit_critical(aa) ? "yes" : "no");
  kv(out, "global", to_string(global_critical_test(aa)));
  const SolvsolitonVerdict sv = solvsoliton_test_aa(aa);
  kv(out, "solvsoliton", to_string(sv.kind));
  if (sv.kind == SolvsolitonKind::Nilsoliton) kv(out, "nilsoliton_c", fmt_double(sv.c));
  return kExitOk;
}

int cmd_hessian(const Options& opt, std::ostream& out) {
  const AAData aa = load_matrix(opt);
  if (!opt.direction.empty()) {
    const MatrixXd b = parse_matrix(opt.direction);
    const double sv = second_variation(aa, b);
    kv(out, "second_variation", fmt_double(sv));
    kv(out, "finite_difference", fmt_double(second_variation_fd(aa, b, 1e-4)));
    return kExitOk;
  }
  kv(out, "verdict", to_string(local_max_classify(aa, opt.trials, opt.seed)));
  return kExitOk;
}

int cmd_flow(const Options& opt, const CLI::App* sub, std::ostream& out,
             std::ostream& session_out) {
  const AAData aa = load_matrix(opt);
  const FlowConfig cfg = flow_config(opt, 1000, sub);
  FlowResult res;
  if (opt.method == "ascent") {
    res = ascent_flow(aa, cfg);
  } else if (opt.method == "double-bracket") {
    res = double_bracket_flow(aa, cfg);
  } else {
    throw std::invalid_argument("--method must be ascent or double-bracket");
  }
  if (!opt.out_path.empty()) {
    out << flow_result_to_json(res) << "\n";
    kv(session_out, "written", opt.out_path);
  } else {
    kv(out, "A_final", matrix_to_json(res.A));
    kv(out, "F_final", res.F_trace.empty() ? "undefined" : fmt_double(res.F_trace.back()));
    kv(out, "iterations", std::to_string(res.iterations));
    kv(out, "converged", res.converged ? "yes" : "no");
    kv(out, "final_residual", fmt_double(res.final_residual));
  }
  if (opt.strict && !res.converged) return kExitStrict;
  return kExitOk;
}

int cmd_soliton(const Options& opt, std::ostream& out) {
  if (!opt.matrix.empty()) {
    const AAData aa = load_matrix(opt);
    const SolvsolitonVerdict sv = solvsoliton_test_aa(aa);
    kv(out, "solvsoliton", to_string(sv.kind));
    if (sv.kind == SolvsolitonKind::Nilsoliton) kv(out, "c", fmt_double(sv.c));
    const double scale = std::max(1.0, aa.norm());
    if (orbit_critical(aa) && std::abs(aa.tr_a) <= aa.tol * scale) {
      if (const auto parts = ricci_soliton_decompose(aa)) {
        kv(out, "ricci_soliton_N", matrix_to_json(parts->N));
        kv(out, "ricci_soliton_C", matrix_to_json(parts->C));
      }
    }
    return kExitOk;
  }
  const MetricLieAlgebra mu = load_bracket(opt);
  const SolitonDecomposition sd = solvsoliton_residual(mu);
  kv(out, "c", fmt_double(sd.c));
  kv(out, "D", matrix_to_json(sd.D));
  kv(out, "residual", fmt_double(sd.residual));
  kv(out, "solvsoliton", sd.is_soliton ? "yes" : "no");
  return kExitOk;
}

int cmd_beta(const Options& opt, const CLI::App* sub, std::ostream& out) {
  if (!opt.beta.empty()) {
    const BetaType bt = make_beta_type(parse_real_list(opt.beta));
    const BetaTypeReport rep = type_invariants_check(bt);
    std::vector<double> vals(bt.b.data(), bt.b.data() + bt.m);
    kv(out, "type", rational_tuple(vals));
    kv(out, "norm_sq", fmt_double(bt.norm_sq));
    kv(out, "q", fmt_double(bt.q));
    kv(out, "trace_ok", rep.trace_ok ? "yes" : "no");
    kv(out, "positivity_ok", rep.positivity_ok ? "yes" : "no");
    kv(out, "sum_inv_sq_nonzero", fmt_double(rep.sum_inv_sq_nonzero));
    return rep.pass ? kExitOk : kExitInvalid;
  }
  const MetricLieAlgebra mu = load_bracket(opt);
  const FlowConfig cfg = flow_config(opt, 4000, sub);
  const BracketFlowResult res = nilsoliton_find(mu, cfg);
  kv(out, "converged", res.converged ? "yes" : "no");
  kv(out, "iterations", std::to_string(res.iterations));
  kv(out, "residual", fmt_double(res.final_residual));
  if (!res.converged) return opt.strict ? kExitStrict : kExitOk;
  const BetaType bt = beta_from_nilsoliton(res.bracket, std::max(cfg.grad_tol * 10, 1e-7));
  std::vector<double> vals(bt.b.data(), bt.b.data() + bt.m);
  kv(out, "type", rational_tuple(vals));
  kv(out, "type_float", [&] {
    std::string s = "[";
    for (int i = 0; i < bt.m; ++i) s += (i ? "," : "") + fmt_double(bt.b(i));
    return s + "]";
  }());
  kv(out, "q", fmt_double(bt.q));
  return kExitOk;
}

int cmd_bound(const Options& opt, std::ostream& out) {
  if (opt.n <= 0 || opt.m <= 0) throw std::invalid_argument("bound needs --n and --m");
  std::optional<BetaType> bt;
  if (!opt.beta.empty()) bt = make_beta_type(parse_real_list(opt.beta));
  out << fmt_double(pinching_bound(opt.n, opt.m, bt)) << "\n";
  return kExitOk;
}

int cmd_table1(const Options& opt, const CLI::App* sub, std::ostream& out) {
  std::vector<int> rows;
  if (opt.rows.empty()) {
    rows = {1, 2, 3, 4, 5, 6, 7, 8};
  } else {
    std::stringstream ss(opt.rows);
    std::string item;
    while (std::getline(ss, item, ',')) rows.push_back(std::stoi(item));
  }
  FlowConfig cfg = flow_config(opt, 4000, sub);
  const Table1Report rep = table1_reproduce(cfg, rows);
  out << "row,printed_type,computed_type,printed_q,computed_q,status\n";
  bool all_match = true;
  for (const auto& row : rep.rows) {
    out << row.name << ",\"" << rational_tuple(row.printed_type) << "\",\""
        << (row.computed_type.empty() ? std::string("-") : rational_tuple(row.computed_type))
        << "\"," << fmt_double(row.printed_q) << ","
        << (row.computed_type.empty() ? std::string("-") : fmt_double(row.computed_q)) << ","
        << to_string(row.status) << "\n";
    if (row.status != Table1Status::Match) all_match = false;
  }
  if (opt.strict && !all_match) return kExitStrict;
  return kExitOk;
}

int cmd_family(const Options& opt, std::ostream& out) {
  if (opt.family.empty()) throw std::invalid_argument("family needs --family");
  const auto [name, t_opt] = resolve_family(opt);
  if (!opt.t_range.empty()) {
    const auto [t0, t1] = parse_range(opt.t_range);
    const int steps = opt.steps > 0 ? opt.steps : 10;
    out << "t,F_closed,F_computed,abs_diff,status\n";
    for (int i = 0; i < steps; ++i) {
      const double t = steps == 1 ? t0 : t0 + (t1 - t0) * i / (steps - 1);
      const FamilySample fs = family(name, t);
      const auto computed = F_aa(fs.aa);
      if (!fs.F_closed || !computed) {
        out << fmt_double(t) << ",,,," << "flat\n";
        continue;
      }
      const double diff = std::abs(*fs.F_closed - *computed);
      out << fmt_double(t) << "," << fmt_double(*fs.F_closed) << "," << fmt_double(*computed)
          << "," << fmt_double(diff) << "," << (diff < 1e-9 ? "ok" : "flagged") << "\n";
    }
    return kExitOk;
  }
  if (!t_opt) throw std::invalid_argument("family needs --t or --t-range");
  const FamilySample fs = family(name, *t_opt);
  kv(out, "A", matrix_to_json(fs.aa.A));
  kv(out, "F_closed", fs.F_closed ? fmt_double(*fs.F_closed) : "undefined (flat)");
  const auto computed = F_aa(fs.aa);
  kv(out, "F_computed", computed ? fmt_double(*computed) : "undefined (flat)");
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"solvpinch: Ricci pinching functional F = scal^2/|Ric|^2 on solvable Lie groups"};
  app.require_subcommand(1);
  Options opt;

  if (const char* env = std::getenv("SOLVPINCH_TOL")) {
    try {
      opt.tol = std::stod(env);
    } catch (const std::exception&) {
      err << "SOLVPINCH_TOL is not a number\n";
      return kExitInvalid;
    }
    if (opt.tol <= 0) {
      err << "SOLVPINCH_TOL must be positive\n";
      return kExitInvalid;
    }
  }

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--matrix", opt.matrix, "matrix JSON (inline or path)");
    sub->add_option("--bracket", opt.bracket, "bracket JSON (inline or path)");
    sub->add_option("--seed", opt.seed, "random seed");
    sub->add_flag("--strict", opt.strict, "nonzero exit on non-convergence or mismatch");
    sub->add_option("--out", opt.out_path, "write the primary output to this path");
    sub->add_option("--format", opt.format, "output format: table or csv")
        ->check(CLI::IsMember({"table", "csv"}));
  };

  CLI::App* check = app.add_subcommand("check", "validate a bracket and report its structure");
  add_common(check);

  CLI::App* ricci_cmd = app.add_subcommand("ricci", "Ricci operator, scal, |Ric|^2 and F");
  add_common(ricci_cmd);

  CLI::App* pinch = app.add_subcommand("pinch", "pinching functional F");
  add_common(pinch);
  pinch->add_option("--family", opt.family, "family name: a_t b_t c_t d_t e_t jordan_t");
  pinch->add_option("--t", opt.t, "family parameter");

  CLI::App* grad = app.add_subcommand("grad", "gradient of F and its orbit projection");
  add_common(grad);

  CLI::App* critical = app.add_subcommand("critical", "criticality and solvsoliton verdicts");
  add_common(critical);

  CLI::App* hessian = app.add_subcommand("hessian", "second variation along orbits");
  add_common(hessian);
  hessian->add_option("--direction", opt.direction, "direction matrix B (JSON)");
  hessian->add_option("--trials", opt.trials, "random directions for classification");

  CLI::App* flow = app.add_subcommand("flow", "orbit flows on the space of matrices");
  add_common(flow);
  flow->add_option("--method", opt.method, "ascent or double-bracket");
  flow->add_option("--steps", opt.steps, "iteration cap");
  flow->add_option("--step", opt.step, "initial step size");
  flow->add_option("--grad-tol", opt.grad_tol, "stopping residual");
  flow->add_flag("--normalize", opt.normalize, "renormalize |A| = 1 along the flow");

  CLI::App* soliton = app.add_subcommand("soliton", "solvsoliton tests and decompositions");
  add_common(soliton);

  CLI::App* beta = app.add_subcommand("beta", "nilsoliton search and beta type extraction");
  add_common(beta);
  beta->add_option("--beta", opt.beta, "check an explicit eigenvalue list instead");
  beta->add_option("--steps", opt.steps, "iteration cap");
  beta->add_option("--grad-tol", opt.grad_tol, "stopping residual");

  CLI::App* bound = app.add_subcommand("bound", "pinching upper bound n - m + q");
  add_common(bound);
  bound->add_option("--n", opt.n, "ambient dimension");
  bound->add_option("--m", opt.m, "nilradical dimension");
  bound->add_option("--beta", opt.beta, "beta eigenvalues (omit for an abelian nilradical)");

  CLI::App* table1 = app.add_subcommand("table1", "reproduce the published m=5 type table");
  add_common(table1);
  table1->add_option("--rows", opt.rows, "comma-separated subset of 1..8");
  table1->add_option("--steps", opt.steps, "iteration cap per row");
  table1->add_option("--grad-tol", opt.grad_tol, "stopping residual per row");

  CLI::App* fam = app.add_subcommand("family", "witness families and parameter sweeps");
  add_common(fam);
  fam->add_option("--family", opt.family, "family name: a_t b_t c_t d_t e_t jordan_t");
  fam->add_option("--t", opt.t, "single parameter value");
  fam->add_option("--t-range", opt.t_range, "sweep range tmin:tmax");
  fam->add_option("--steps", opt.steps, "sweep point count");

  std::vector<const char*> argv;
  argv.push_back("solvpinch");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    err << "run 'solvpinch --help' for usage\n";
    return kExitUsage;
  }

  try {
    Sink sink(opt.out_path, out);
    if (check->parsed()) return cmd_check(opt, sink.stream());
    if (ricci_cmd->parsed()) return cmd_ricci(opt, sink.stream());
    if (pinch->parsed()) return cmd_pinch(opt, sink.stream());
    if (grad->parsed()) return cmd_grad(opt, sink.stream());
    if (critical->parsed()) return cmd_critical(opt, sink.stream());
    if (hessian->parsed()) return cmd_hessian(opt, sink.stream());
    if (flow->parsed()) return cmd_flow(opt, sink.stream(), out);
    if (soliton->parsed()) return cmd_soliton(opt, sink.stream());
    if (beta->parsed()) return cmd_beta(opt, sink.stream());
    if (bound->parsed()) return cmd_bound(opt, sink.stream());
    if (table1->parsed()) return cmd_table1(opt, sink.stream());
    if (fam->parsed()) return cmd_family(opt, sink.stream());
    err << "unknown command\n";
    return kExitUsage;
  } catch (const FlatError& e) {
    err << e.what() << "\n";
    return kExitFlat;
  } catch (const PreconditionError& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::domain_error& e) {
    err << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace solvpinch
