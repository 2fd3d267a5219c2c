#include "cli.hpp"

#include <CLI11.hpp>

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "json.hpp"
#include "spin7/diagonal.hpp"
#include "spin7/errors.hpp"
#include "spin7/field_parser.hpp"
#include "spin7/flat_models.hpp"
#include "spin7/pde_grid.hpp"
#include "spin7/potential.hpp"
#include "spin7/riemann.hpp"
#include "spin7/torsion.hpp"

namespace spin7::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr int kSchemaVersion = 1;

struct FieldArgs {
  std::string family;
  std::string field;
};

struct ResolvedField {
  std::string label;
  SymMatrixField v;
  std::optional<DiagonalField> diag;
};

void add_field_options(CLI::App* sub, FieldArgs& fa) {
  sub->add_option("--family", fa.family, "named solution family")->check(CLI::IsMember(example_family_names()));
  sub->add_option("--field", fa.field, "inline field, e.g. V=diag(nu1,nu2,nu3,nu0)");
}

ResolvedField resolve(const FieldArgs& fa) {
  if (fa.family.empty() == fa.field.empty()) throw ParseError("give exactly one of --family and --field");
  ResolvedField r;
  if (!fa.family.empty()) {
    r.label = fa.family;
    r.diag = example_family(fa.family);
    r.v = r.diag->matrix();
    return r;
  }
  r.label = fa.field;
  r.v = parse_field(fa.field);
  if (r.v.is_diagonal()) {
    DiagonalField d;
    for (int i = 0; i < 4; ++i) d.v[i] = r.v(i, i);
    r.diag = d;
  }
  return r;
}

std::string text(const Poly& p) {
  static const std::array<std::string, 4> names{"nu0", "nu1", "nu2", "nu3"};
  return p.to_string(names);
}

Json entries_json(const SymMatrixField& v) {
  Json arr = Json::array();
  for (const auto& [a, b] : upper_pairs()) arr.push_back(text(v(a, b)));
  return arr;
}

std::string pair_name(int a, int b) { return std::to_string(a) + std::to_string(b); }

bool torsion_free(const SymMatrixField& v) {
  for (const auto& r : divergence_residual(v)) {
    if (!r.is_zero()) return false;
  }
  auto e = elliptic_residual(v);
  for (const auto& [a, b] : upper_pairs()) {
    if (!e[a][b].is_zero()) return false;
  }
  return true;
}

// Rational points with det V != 0, coordinates in [1/4, 9].
std::vector<std::vector<Rational>> rational_points(const SymMatrixField& v, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> num(1, 9), den(1, 4);
  const Poly det = v.det();
  std::vector<std::vector<Rational>> pts;
  for (int attempt = 0; static_cast<int>(pts.size()) < count; ++attempt) {
    if (attempt > 1000 * count) throw DegenerateFieldError("det V vanishes at every sampled point");
    std::vector<Rational> p(4);
    for (auto& x : p) {
      x = Rational(num(rng), den(rng));
      x.canonicalize();
    }
    if (det.evaluate(p) != 0) pts.push_back(p);
  }
  return pts;
}

// Points in [1/2, 2]^4 (multiples of 1/8) where V is positive definite.
std::vector<std::array<double, 4>> metric_points(const SymMatrixField& v, int count, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> k(4, 16);
  std::vector<std::array<double, 4>> pts;
  for (int attempt = 0; static_cast<int>(pts.size()) < count; ++attempt) {
    if (attempt > 1000 * count) throw DegenerateFieldError("V is not positive definite at any sampled point");
    std::array<double, 4> p;
    for (auto& x : p) x = k(rng) / 8.0;
    Eigen::LLT<Eigen::Matrix4d> llt(v.evaluate(std::span<const double>(p)));
    if (llt.info() == Eigen::Success) pts.push_back(p);
  }
  return pts;
}

Json check(const std::string& name, bool pass) {
  Json j;
  j["name"] = name;
  j["pass"] = pass;
  return j;
}

bool all_pass(const Json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Json& c) { return c["pass"].get<bool>(); });
}

int emit(const Json& report, const std::string& out_path, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path);
    if (!f) throw ParseError("cannot write " + out_path);
    f << text;
  }
  return report["pass"].get<bool>() ? kSuccess : kCheckFailed;
}

Rational parse_constant(const std::string& s) {
  Poly p = parse_poly(s);
  if (!(p - Poly(p.constant_term())).is_zero()) throw ParseError("expected a constant: " + s);
  return p.constant_term();
}

// --- verify -----------------------------------------------------------------

struct VerifyArgs {
  FieldArgs field;
  int points = 4;
  unsigned seed = 1;
  bool emit_deviations = false;
  std::string out;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const ResolvedField f = resolve(a.field);
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "verify";
  r["field"] = f.label;
  r["entries"] = entries_json(f.v);
  if (f.diag) r["case"] = classify_case(DependencePattern::of(*f.diag)).describe();
  Json checks = Json::array();

  Json div = check("divergence", true);
  Json divres = Json::array();
  for (const auto& p : divergence_residual(f.v)) {
    divres.push_back(text(p));
    if (!p.is_zero()) div["pass"] = false;
  }
  div["residual"] = divres;
  checks.push_back(div);

  Json ell = check("elliptic", true);
  Json nz = Json::array();
  auto e = elliptic_residual(f.v);
  for (const auto& [i, j] : upper_pairs()) {
    if (e[i][j].is_zero()) continue;
    ell["pass"] = false;
    nz.push_back({{"entry", pair_name(i, j)}, {"value", text(e[i][j])}});
  }
  ell["nonzero_entries"] = nz;
  checks.push_back(ell);

  if (f.diag) {
    Json red = check("reduced", true);
    auto rr = reduced_residuals(*f.diag);
    Json items = Json::array();
    for (int i = 0; i < 4; ++i) {
      if (!rr.l_red[i].is_zero()) items.push_back({{"equation", "l_red_" + std::to_string(i)}, {"value", text(rr.l_red[i])}});
    }
    const char* qn[6] = {"01", "02", "03", "12", "13", "23"};
    for (int k = 0; k < 6; ++k) {
      if (!rr.q_red[k].is_zero()) items.push_back({{"equation", std::string("q_red_") + qn[k]}, {"value", text(rr.q_red[k])}});
    }
    red["pass"] = items.empty();
    red["nonzero_entries"] = items;
    checks.push_back(red);
  }

  const CurvatureSet cs = curvature_matrices(f.v);
  const RationalForm dphi = oracle_dphi(f.v, cs);
  Json dp = check("dphi", dphi.is_zero());
  dp["nonzero_terms"] = dphi.num.terms().size();
  checks.push_back(dp);

  Json dw = check("domega", true);
  Json dwn = Json::array();
  for (const auto& w : oracle_domega(f.v)) {
    dwn.push_back(w.terms().size());
    if (!w.is_zero()) dw["pass"] = false;
  }
  dw["nonzero_terms"] = dwn;
  checks.push_back(dw);

  const auto pts = rational_points(f.v, a.points, a.seed);
  const auto devs = formula_deviations({f.v}, pts);
  Json fc = check("formula_vs_oracle", devs.empty());
  fc["points"] = pts.size();
  fc["deviations"] = devs.size();
  checks.push_back(fc);

  r["checks"] = checks;
  r["pass"] = all_pass(checks);
  if (a.emit_deviations) r["deviations"] = Json::parse(deviations_json(devs));
  return emit(r, a.out, out);
}

// --- holonomy ---------------------------------------------------------------

struct HolonomyArgs {
  FieldArgs field;
  int points = 3;
  unsigned seed = 1;
  std::string method = "exact";
  double h = 1e-3;
  int expected = 21;
  double threshold = 1e-7;
  double membership_tol = 1e-6;
  bool serial = false;
  std::string out;
};

int cmd_holonomy(const HolonomyArgs& a, std::ostream& out) {
  const ResolvedField f = resolve(a.field);
  if (!torsion_free(f.v)) {
    Json r;
    r["schema_version"] = kSchemaVersion;
    r["command"] = "holonomy";
    r["family"] = f.label;
    r["error"] = "field is not torsion-free";
    r["pass"] = false;
    return emit(r, a.out, out);
  }
  const MetricChart chart = MetricChart::from_field(f.v);
  const auto pts = metric_points(f.v, a.points, a.seed);
  std::vector<CurvatureSample> samples;
  double h = 0.0;
  if (a.method == "richardson") {
    h = a.h;
    for (const auto& p : pts) samples.push_back(curvature_richardson(chart, p, a.h));
  } else {
    CurvatureOptions opts;
    if (a.method == "fd") {
      opts.method = Differentiation::finite_difference;
      opts.h = h = a.h;
    }
    samples = curvature_samples(chart, pts, opts, !a.serial);
  }
  const HolonomySpan span = holonomy_span(samples, a.threshold);
  Json r = Json::parse(holonomy_report_json(f.label, samples, h, span));
  r["command"] = "holonomy";
  r["method"] = a.method;
  r["expected_span_dim"] = a.expected;
  r["singular_values"] = span.singular_values;
  r["pass"] = span.dimension == a.expected && span.max_defect < a.membership_tol;
  return emit(r, a.out, out);
}

// --- solve-r31 / solve-r22 --------------------------------------------------

struct SolveArgs {
  std::string boundary = "trilinear";
  std::vector<double> box;
  std::vector<int> n{17};
  double c = 1.0, d = 0.0;
  std::string c_text, d_text;
  SolverOptions solver;
  bool serial = false;
  bool check = false;
  std::string csv;
  std::string out;
};

Poly named_r31_boundary(const std::string& name) {
  if (name == "trilinear" || name == "triple-product") return nu(1) * nu(2) * nu(3);
  if (name == "cubic") return example_family("cubic").v[0];
  return parse_poly(name);
}

GridSpec solve_box(int dim, const std::vector<double>& box, const std::string& boundary, int n) {
  GridSpec s;
  s.dim = dim;
  if (box.empty()) {
    for (int a = 0; a < dim; ++a) {
      s.lo[a] = dim == 3 ? 1.0 : 0.0;
      s.hi[a] = dim == 3 ? 2.0 : 1.0;
    }
    if (dim == 3 && boundary == "cubic") {
      s.lo[2] = 0.25;
      s.hi[2] = 0.75;
    }
  } else if (box.size() == 2) {
    for (int a = 0; a < dim; ++a) {
      s.lo[a] = box[0];
      s.hi[a] = box[1];
    }
  } else if (box.size() == static_cast<std::size_t>(2 * dim)) {
    for (int a = 0; a < dim; ++a) {
      s.lo[a] = box[2 * a];
      s.hi[a] = box[2 * a + 1];
    }
  } else {
    throw ParseError("--box takes lo,hi or one lo,hi pair per axis");
  }
  for (int a = 0; a < dim; ++a) s.n[a] = n;
  s.validate();
  return s;
}

int cmd_solve(bool r22, SolveArgs a, std::ostream& out) {
  const int dim = r22 ? 2 : 3;
  const Poly v0 = r22 ? parse_poly(a.boundary) : named_r31_boundary(a.boundary);
  std::vector<int> vars = r22 ? std::vector<int>{1, 2} : std::vector<int>{1, 2, 3};
  for (int k : {0, r22 ? 3 : 0}) {
    if (v0.degree_in(k) > 0) throw ParseError("boundary data may only use the grid variables");
  }
  Rational c = 1, d = 0;
  if (r22) {
    c = a.c_text.empty() ? Rational(1) : parse_constant(a.c_text);
    d = a.d_text.empty() ? Rational(0) : parse_constant(a.d_text);
  }
  bool exact = false;
  if (r22) {
    Poly res = (Poly(c) + nu(2).scaled(d)) * v0.derivative(1).derivative(1) + v0.derivative(2).derivative(2);
    exact = res.is_zero();
  } else {
    exact = r31_residual(v0).is_zero();
  }
  const GridFunction g = poly_on_axes(v0, vars);
  SolverOptions opts = a.solver;
  opts.parallel = !a.serial;

  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = r22 ? "solve-r22" : "solve-r31";
  r["boundary"] = text(v0);
  if (r22) {
    r["c"] = rational_to_string(c);
    r["d"] = rational_to_string(d);
  }
  r["closed_form"] = exact;
  Json runs = Json::array();
  std::vector<double> errors;
  GridField last;
  for (int n : a.n) {
    const GridSpec s = solve_box(dim, a.box, a.boundary, n);
    SolveResult res = r22 ? solve_r22(s, c.get_d(), d.get_d(), g, opts) : solve_r31(s, g, opts);
    Json run;
    run["n"] = n;
    run["box"] = {std::vector<double>(s.lo.begin(), s.lo.begin() + dim), std::vector<double>(s.hi.begin(), s.hi.begin() + dim)};
    run["iterations"] = res.report.iterations;
    run["final_update"] = res.report.final_update;
    run["residual_norm"] = res.report.residual_norm;
    if (exact) {
      errors.push_back(interior_error(res.field, g));
      run["max_error"] = errors.back();
    }
    runs.push_back(run);
    last = std::move(res.field);
  }
  r["runs"] = runs;
  bool pass = true;
  if (exact && errors.size() > 1) {
    Json ratios = Json::array();
    for (std::size_t k = 1; k < errors.size(); ++k) {
      const double q = errors[k - 1] / errors[k];
      ratios.push_back(q);
      pass = pass && q >= 3.5 && q <= 4.5;
    }
    r["error_ratios"] = ratios;
  } else if (exact) {
    pass = errors[0] < 1e-9;
  }
  r["check"] = a.check;
  r["pass"] = a.check ? exact && pass : true;
  if (!a.csv.empty()) {
    std::ofstream f(a.csv);
    if (!f) throw ParseError("cannot write " + a.csv);
    write_csv(f, last);
  }
  return emit(r, a.out, out);
}

// --- flat-model ---------------------------------------------------------------

struct FlatArgs {
  std::string kind;
  bool check = false;
  bool graph = false;
  unsigned seed = 1;
  int samples = 100;
  std::vector<double> box;
  std::string csv;
  std::string out;
};

int cmd_flat(const FlatArgs& a, std::ostream& out) {
  const FlatModel m = flat_model(parse_flat_kind(a.kind));
  const bool do_check = a.check || !a.graph;
  const bool do_graph = a.graph || !a.check;
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "flat-model";
  r["model"] = to_string(m.kind);
  bool pass = true;
  if (do_check) {
    Json c;
    bool moment = true, brackets = true, invariance = true;
    for (const auto& res : moment_identity_residuals(m)) moment = moment && res.is_zero();
    for (int i = 0; i < 4; ++i) {
      invariance = invariance && lie_derivative(m.u[i], m.phi).is_zero();
      for (int j = 0; j < 4; ++j) {
        for (const auto& comp : bracket(m.u[i], m.u[j])) brackets = brackets && comp.is_zero();
        invariance = invariance && derivative_along(m.u[i], m.nu[j]).is_zero();
      }
    }
    const bool closed = d_flat(m.phi).is_zero();
    const bool isotropic = orbit_restriction(m).is_zero();
    std::mt19937 rng(a.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double defect = 0.0;
    for (int s = 0; s < a.samples; ++s) {
      std::array<double, 8> p;
      for (auto& x : p) x = u(rng);
      defect = std::max(defect, verify_moment_identities(m, p).defect);
    }
    c["moment_identities_exact"] = moment;
    c["closed"] = closed;
    c["brackets_vanish"] = brackets;
    c["invariant"] = invariance;
    c["isotropic"] = isotropic;
    c["samples"] = a.samples;
    c["seed"] = a.seed;
    c["max_defect"] = defect;
    const bool ok = moment && closed && brackets && invariance && isotropic && defect < 1e-10;
    c["pass"] = ok;
    pass = pass && ok;
    r["identities"] = c;
  }
  if (do_graph) {
    NuBox box;
    if (a.box.size() == 2) {
      box.lo.fill(a.box[0]);
      box.hi.fill(a.box[1]);
    } else if (a.box.size() == 8) {
      for (int i = 0; i < 4; ++i) {
        box.lo[i] = a.box[2 * i];
        box.hi[i] = a.box[2 * i + 1];
      }
    } else if (!a.box.empty()) {
      throw ParseError("--box takes lo,hi or four lo,hi pairs");
    }
    const SingularGraph g = singular_graph(m, box);
    Json gj = Json::parse(g.to_json());
    gj["balanced"] = g.balanced();
    pass = pass && g.balanced();
    r["graph"] = gj;
    if (!a.csv.empty()) {
      std::ofstream f(a.csv);
      if (!f) throw ParseError("cannot write " + a.csv);
      g.write_csv(f);
    }
  }
  r["pass"] = pass;
  return emit(r, a.out, out);
}

// --- potential ----------------------------------------------------------------

struct PotentialArgs {
  FieldArgs field;
  std::vector<double> box{1.0, 2.0};
  int n = 9;
  double tol = 1e-10;
  bool serial = false;
  std::string out;
};

int cmd_potential(const PotentialArgs& a, std::ostream& out) {
  const ResolvedField f = resolve(a.field);
  if (a.box.size() != 2) throw ParseError("--box takes lo,hi");
  const GridSpec s = GridSpec::cube(4, a.box[0], a.box[1], a.n);
  const SampledSymField v = SampledSymField::sample(f.v, s);
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "potential";
  r["field"] = f.label;
  r["n"] = a.n;
  r["box"] = a.box;
  PotentialOptions opts;
  opts.parallel = !a.serial;
  try {
    const PotentialField p = potential_construct(v, opts);
    const double res = potential_residual(p, v), asym = potential_asymmetry(p);
    r["divergence_max"] = p.divergence_max;
    r["reconstruction_error"] = res;
    r["asymmetry"] = asym;
    r["pass"] = res < a.tol && asym < a.tol;
  } catch (const DivergenceError& e) {
    r["error"] = e.what();
    r["pass"] = false;
  }
  return emit(r, a.out, out);
}

// --- transform ----------------------------------------------------------------

struct TransformArgs {
  FieldArgs field;
  std::string matrix;
  std::string out;
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
  const ResolvedField f = resolve(a.field);
  std::vector<std::string> parts;
  std::stringstream ss(a.matrix);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 16) throw ParseError("--matrix takes 16 comma-separated rationals in row order");
  RationalMatrix4 m;
  for (int i = 0; i < 16; ++i) m[i / 4][i % 4] = parse_constant(parts[i]);
  if (det4(m) == 0) throw ParseError("--matrix is singular");
  const GL4Action g(m);
  const SymMatrixField t = gl4_transform(f.v, g);
  const bool before = torsion_free(f.v), after = torsion_free(t);
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["command"] = "transform";
  r["field"] = f.label;
  r["det"] = rational_to_string(g.det());
  r["entries"] = entries_json(t);
  r["input_torsion_free"] = before;
  r["output_torsion_free"] = after;
  r["pass"] = before == after;
  return emit(r, a.out, out);
}

// Expands --config FILE into --key=value arguments placed right after the subcommand.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ParseError("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;
  if (args.empty()) throw ParseError("--config needs a subcommand");
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read config " + path);
  std::vector<std::string> extra;
  for (const auto& [k, v] : read_config(in)) extra.push_back("--" + k + "=" + v);
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> read_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> kv;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789-") != std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    }
    kv.emplace_back(key, value);
  }
  return kv;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toric Spin(7) structures: verification, holonomy, solvers and flat models", "spin7"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "exact torsion-freeness checks for a field");
  add_field_options(verify, va.field);
  verify->add_option("--points", va.points, "rational sample points for the formula comparison")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed);
  verify->add_flag("--emit-deviations", va.emit_deviations, "include formula-vs-oracle deviations");
  verify->add_option("--out", va.out);

  HolonomyArgs ha;
  auto* holo = app.add_subcommand("holonomy", "curvature span certification");
  add_field_options(holo, ha.field);
  holo->add_option("--points", ha.points)->check(CLI::PositiveNumber);
  holo->add_option("--seed", ha.seed);
  holo->add_option("--method", ha.method)->check(CLI::IsMember({"exact", "fd", "richardson"}));
  holo->add_option("--step", ha.h, "finite-difference step")->check(CLI::PositiveNumber);
  holo->add_option("--expected", ha.expected);
  holo->add_option("--threshold", ha.threshold)->check(CLI::PositiveNumber);
  holo->add_option("--membership-tol", ha.membership_tol)->check(CLI::PositiveNumber);
  holo->add_flag("--serial", ha.serial);
  holo->add_option("--out", ha.out);

  SolveArgs sa31, sa22;
  sa22.boundary = "nu1^2-nu2^2";
  auto add_solve = [&](const char* name, const char* help, SolveArgs& s, bool r22) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--boundary", s.boundary, r22 ? "polynomial in nu1, nu2" : "trilinear, cubic or a polynomial in nu1..nu3");
    sub->add_option("--box", s.box, "lo,hi or one lo,hi pair per axis")->delimiter(',');
    sub->add_option("--n", s.n, "points per axis; several values give a convergence study")->delimiter(',');
    sub->add_option("--omega", s.solver.omega);
    sub->add_option("--tol", s.solver.tolerance);
    sub->add_option("--max-iter", s.solver.max_iterations);
    if (r22) {
      sub->add_option("--c", s.c_text, "constant C in C + D nu2");
      sub->add_option("--d", s.d_text, "constant D in C + D nu2");
    }
    sub->add_flag("--serial", s.serial);
    sub->add_flag("--check", s.check, "fail unless the closed form is recovered (one n) or converges at order 2");
    sub->add_option("--csv", s.csv, "write the finest grid");
    sub->add_option("--out", s.out);
    return sub;
  };
  auto* r31 = add_solve("solve-r31", "SOR solve of nu2 V_11 + nu3 V_22 + nu1 V_33 = 0", sa31, false);
  auto* r22 = add_solve("solve-r22", "SOR solve of (C + D nu2) V_11 + V_22 = 0", sa22, true);

  FlatArgs fa;
  auto* flat = app.add_subcommand("flat-model", "moment identities and singular graph of a flat model");
  flat->add_option("kind", fa.kind, "stab-T2 or stab-S1")->required();
  flat->add_flag("--check", fa.check);
  flat->add_flag("--graph", fa.graph);
  flat->add_option("--seed", fa.seed);
  flat->add_option("--samples", fa.samples)->check(CLI::PositiveNumber);
  flat->add_option("--box", fa.box)->delimiter(',');
  flat->add_option("--csv", fa.csv);
  flat->add_option("--out", fa.out);

  PotentialArgs pa;
  auto* pot = app.add_subcommand("potential", "grid potential construction and round trip");
  add_field_options(pot, pa.field);
  pot->add_option("--box", pa.box)->delimiter(',');
  pot->add_option("--n", pa.n)->check(CLI::Range(5, 65));
  pot->add_option("--tol", pa.tol);
  pot->add_flag("--serial", pa.serial);
  pot->add_option("--out", pa.out);

  TransformArgs ta;
  auto* tr = app.add_subcommand("transform", "GL(4) action on a field");
  add_field_options(tr, ta.field);
  tr->add_option("--matrix", ta.matrix, "16 rationals in row order")->required();
  tr->add_option("--out", ta.out);

  try {
    args = expand_config(std::move(args));
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
    if (*verify) return cmd_verify(va, out);
    if (*holo) return cmd_holonomy(ha, out);
    if (*r31) return cmd_solve(false, sa31, out);
    if (*r22) return cmd_solve(true, sa22, out);
    if (*flat) return cmd_flat(fa, out);
    if (*pot) return cmd_potential(pa, out);
    if (*tr) return cmd_transform(ta, out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NonEllipticError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const DegenerateFieldError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const IllConditionedError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsageError;
}

}  // namespace spin7::cli
