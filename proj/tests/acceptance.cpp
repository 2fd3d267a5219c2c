// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include "spin7/diagonal.hpp"
#include "spin7/flat_models.hpp"
#include "spin7/pde_grid.hpp"
#include "spin7/potential.hpp"
#include "spin7/riemann.hpp"
#include "spin7/torsion.hpp"
#include "test_util.hpp"

using namespace spin7;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

bool all_zero(const SymPolyMatrix& m) {
  for (const auto& row : m)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

bool torsion_free(const SymMatrixField& v) { return is_divergence_free(v) && all_zero(elliptic_residual(v)); }

PolyForm dnu2(int i, int j) { return wedge(PolyForm::dnu(i), PolyForm::dnu(j)); }

const std::vector<std::string> kFamilies = {"linear-cycle", "triple-product", "cubic"};

Outcome exact_solutions() {
  bool ok = true;
  for (const auto& name : kFamilies) {
    auto f = example_family(name);
    auto v = f.matrix();
    ok = ok && is_divergence_free(v) && reduced_residuals(f).all_zero();
    ok = ok && oracle_dphi(v, curvature_matrices(v)).is_zero();
    for (const auto& w : oracle_domega(v)) ok = ok && w.is_zero();
  }
  return {ok, "divergence, reduced residuals, dPhi, domega exact for 3 families"};
}

Outcome displays() {
  bool ok = true;
  auto lc = diag_curvature_forms(example_family("linear-cycle"));
  ok = ok && lc[0] == dnu2(2, 3).scaled(-nu(2)) && lc[1] == dnu2(3, 0).scaled(nu(3)) &&
       lc[2] == dnu2(0, 1).scaled(-nu(0)) && lc[3] == dnu2(1, 2).scaled(nu(1));
  auto tp = diag_curvature_forms(example_family("triple-product"));
  PolyForm w0 = dnu2(1, 2).scaled(-(nu(1).pow(2) * nu(2))) - dnu2(3, 1).scaled(nu(3).pow(2) * nu(1)) -
                dnu2(2, 3).scaled(nu(2).pow(2) * nu(3));
  ok = ok && tp[0] == w0 && tp[1] == dnu2(0, 3).scaled(-nu(3)) && tp[2] == dnu2(0, 1).scaled(-nu(1)) &&
       tp[3] == dnu2(0, 2).scaled(-nu(2));
  // The general closed form must give the same forms.
  for (const auto& name : {"linear-cycle", "triple-product"}) {
    auto f = example_family(name);
    auto general = curvature_matrices(f.matrix()).omegas();
    auto diag = diag_curvature_forms(f);
    for (int l = 0; l < 4; ++l) ok = ok && general[l] == diag[l];
  }
  return {ok, "8 curvature forms equal the displayed polynomials"};
}

Outcome oracle_equivalence() {
  std::mt19937 rng(2024);
  std::vector<SymMatrixField> fields;
  for (int t = 0; t < 12; ++t) fields.push_back(testing::random_divergence_free(rng, 4));
  for (int t = 0; t < 12; ++t) fields.push_back(testing::termwise_divergence_free(rng, 2));
  const std::vector<std::vector<Rational>> pts = {testing::point4(1, 2, 3, 4), testing::point4(2, 1, -1, 1),
                                                  {Rational(1, 2), 3, Rational(2, 3), 1}};
  bool oracle_ok = true;
  int max_degree = 0;
  for (const auto& v : fields) {
    for (const auto& row : v.matrix())
      for (const auto& e : row) max_degree = std::max(max_degree, e.total_degree());
    oracle_ok = oracle_ok && is_divergence_free(v);
    for (const auto& p : pts) oracle_ok = oracle_ok && solve_curvature_at(v, p).has_value();
  }
  const auto devs = formula_deviations(fields, pts);
  // dω = C (L + Q) as polynomials, and C has a left inverse.
  const auto& c = stored_correspondence();
  const QMatrix pinv = correspondence_left_inverse();
  bool corr = true;
  for (const auto& v : fields) {
    auto e = elliptic_residual(v);
    auto w = domega_components(v);
    for (int r = 0; r < 16; ++r) {
      Poly pred;
      for (int k = 0; k < 10; ++k) {
        auto [a, b] = upper_pairs()[k];
        if (c[r][k] != 0) pred += e[a][b].scaled(c[r][k]);
      }
      corr = corr && pred == w[r];
    }
    for (int k = 0; k < 10; ++k) {
      Poly back;
      for (int r = 0; r < 16; ++r) back += w[r].scaled(pinv[k][r]);
      auto [a, b] = upper_pairs()[k];
      corr = corr && back == e[a][b];
    }
  }
  auto recomputed = recompute_correspondence(fields, pts);
  bool same = recomputed.has_value();
  for (int r = 0; same && r < 16; ++r)
    for (int k = 0; k < 10; ++k) same = same && (*recomputed)[r][k] == c[r][k];
  const bool ok = oracle_ok && corr && same && devs.empty() && max_degree <= 2;
  return {ok, std::to_string(fields.size()) + " fields of degree <= " + std::to_string(max_degree) + ", " +
                  std::to_string(devs.size()) + " deviations, correspondence " + (corr && same ? "exact" : "broken")};
}

Outcome holonomy() {
  auto chart = MetricChart::from_field(example_family("linear-cycle").matrix());
  const std::vector<std::array<double, 4>> pts = {{1, 2, 3, 4}, {2, 1, 1, 3}, {1.5, 2.5, 0.5, 1}};
  std::vector<CurvatureSample> samples;
  for (const auto& p : pts) samples.push_back(curvature_richardson(chart, p, 1e-2));
  double ricci = 0.0;
  for (const auto& s : samples) ricci = std::max(ricci, s.ricci_relative());
  auto span = holonomy_span(samples);
  const bool ok = ricci < 1e-6 && span.max_defect < 1e-6 && span.dimension == 21 && span.min_gap >= 1e3;
  return {ok, "span " + std::to_string(span.dimension) + fmt(", gap %.2e", span.min_gap) + fmt(", ricci %.2e", ricci) +
                  fmt(", membership %.2e", span.max_defect)};
}

Outcome flat_identities() {
  std::mt19937 rng(100);
  std::uniform_real_distribution<double> u(-1, 1);
  bool ok = true;
  double worst = 0.0;
  for (FlatKind k : {FlatKind::stab_t2, FlatKind::stab_s1}) {
    auto m = flat_model(k);
    for (int t = 0; t < 100; ++t) {
      std::array<double, 8> p;
      for (auto& x : p) x = u(rng);
      worst = std::max(worst, verify_moment_identities(m, p).defect);
    }
    for (const auto& r : moment_identity_residuals(m)) ok = ok && r.is_zero();
    ok = ok && d_flat(m.phi).is_zero() && orbit_restriction(m).is_zero();
    for (int i = 0; i < 4; ++i) {
      ok = ok && lie_derivative(m.u[i], m.phi).is_zero();
      for (int j = 0; j < 4; ++j) {
        for (const auto& comp : bracket(m.u[i], m.u[j])) ok = ok && comp.is_zero();
        ok = ok && derivative_along(m.u[i], m.nu[j]).is_zero();
      }
    }
  }
  return {ok && worst < 1e-10, fmt("max moment defect %.2e over 2 x 100 points", worst)};
}

Outcome graph() {
  auto t2 = singular_graph(flat_model(FlatKind::stab_t2), NuBox{});
  std::array<long, 4> sum{};
  bool primitive = true;
  for (const auto& e : t2.edges) {
    long g = 0;
    for (int a = 0; a < 4; ++a) {
      sum[a] += e.dir[a];
      g = std::gcd(g, std::abs(e.dir[a]));
    }
    primitive = primitive && g == 1;
  }
  auto s1 = singular_graph(flat_model(FlatKind::stab_s1), NuBox{});
  const bool line = s1.edges.size() == 1 && s1.edges[0].full_line && s1.edges[0].dir == std::array<long, 4>{0, 0, 0, 1};
  const bool ok = t2.edges.size() == 3 && primitive && sum == std::array<long, 4>{0, 0, 0, 0} && line;
  return {ok, std::to_string(t2.edges.size()) + " primitive edges summing to zero; S1 graph " +
                  (line ? "one nu3 line" : "not a nu3 line")};
}

Outcome pde() {
  auto box = [](int n) {
    GridSpec s;
    s.dim = 3;
    s.lo = {1, 1, 0.25, 0};
    s.hi = {2, 2, 0.75, 0};
    s.n = {n, n, n, 1};
    return s;
  };
  auto cubic = poly_on_axes(example_family("cubic").v[0], {1, 2, 3});
  const double e17 = interior_error(solve_r31(box(17), cubic).field, cubic);
  const double e33 = interior_error(solve_r31(box(33), cubic).field, cubic);
  const double ratio = e17 / e33;
  auto tri = poly_on_axes(example_family("triple-product").v[0], {1, 2, 3});
  GridSpec unit = GridSpec::cube(3, 1, 2, 33);
  const double etri = interior_error(solve_r31(unit, tri).field, tri);
  const bool ok = ratio >= 3.5 && ratio <= 4.5 && etri <= 1e-9;
  return {ok, fmt("cubic errors %.2e", e17) + fmt(" -> %.2e", e33) + fmt(", ratio %.3f", ratio) +
                  fmt(" (need [3.5, 4.5]); trilinear error %.2e", etri)};
}

Outcome potential() {
  auto v = SampledSymField::sample(example_family("linear-cycle").matrix(), GridSpec::cube(4, 1, 2, 9));
  auto p = potential_construct(v);
  const double res = potential_residual(p, v), asym = potential_asymmetry(p);
  return {res < 1e-10 && asym < 1e-10, fmt("round trip %.2e", res) + fmt(", asymmetry %.2e", asym)};
}

Outcome naturality() {
  std::mt19937 rng(909);
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  int mapped = 0, verified = 0;
  for (int t = 0; t < 10; ++t) {
    RationalMatrix4 m;
    do {
      for (auto& row : m) {
        for (auto& x : row) {
          x = Rational(num(rng), den(rng));
          x.canonicalize();
        }
      }
    } while (det4(m) == 0);
    GL4Action g(m);
    for (const auto& name : kFamilies) {
      ++mapped;
      verified += torsion_free(gl4_transform(example_family(name).matrix(), g));
    }
  }
  std::vector<SymMatrixField> fields{SymMatrixField::diagonal({nu(1) * nu(1), nu(0), Poly(1L), nu(2)})};
  for (int t = 0; t < 5; ++t) fields.push_back(testing::random_field(rng, 2, 3));
  std::optional<int> weight;
  bool consistent = true;
  int non_solutions = 0;
  for (const auto& v : fields) {
    if (all_zero(elliptic_residual(v))) continue;
    ++non_solutions;
    for (const Rational& t : {Rational(2), Rational(1, 3)}) {
      auto w = elliptic_scaling_weight(v, t);
      if (!w || (weight && *w != *weight)) consistent = false;
      if (w && !weight) weight = w;
    }
  }
  const bool ok = verified == mapped && consistent && non_solutions >= 5;
  return {ok, std::to_string(verified) + "/" + std::to_string(mapped) + " transformed solutions verified; weight " +
                  (weight ? std::to_string(*weight) : std::string("none")) + " on " + std::to_string(non_solutions) +
                  " non-solutions"};
}

Outcome degeneration() {
  DiagonalField f = example_family("triple-product");
  f.v[3] = Poly(1L);
  if (!reduced_residuals(f).all_zero()) return {false, "reducible family is not a solution"};
  auto chart = MetricChart::from_field(f.matrix());
  const std::vector<std::array<double, 4>> pts = {{1.0, 1.5, 1.2, 0.5}, {0.8, 2.0, 1.0, 1.5}, {1.3, 1.1, 1.7, 0.9}};
  auto span = holonomy_span(curvature_samples(chart, pts));
  return {span.dimension <= 15, "span " + std::to_string(span.dimension) + " (bound 15)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact solution verification", 10, exact_solutions},
      {2, "curvature display reproduction", 10, displays},
      {3, "oracle equivalence", 60, oracle_equivalence},
      {4, "holonomy certification", 60, holonomy},
      {5, "flat-model identities", 10, flat_identities},
      {6, "trivalent graph", 1, graph},
      {7, "PDE solver convergence", 120, pde},
      {8, "potential round trip", 60, potential},
      {9, "naturality", 120, naturality},
      {10, "degeneration bound", 60, degeneration},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                secs, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
