#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "spin7/diagonal.hpp"
#include "spin7/errors.hpp"
#include "spin7/pde_grid.hpp"
#include "spin7/torsion.hpp"

using namespace spin7;

namespace {

GridSpec r31_box(int n) {
  GridSpec s;
  s.dim = 3;
  s.lo = {1, 1, 0.25, 0};
  s.hi = {2, 2, 0.75, 0};
  s.n = {n, n, n, 1};
  return s;
}

GridSpec r22_box(int n) {
  GridSpec s;
  s.dim = 2;
  s.lo = {0, 0, 0, 0};
  s.hi = {1, 1, 0, 0};
  s.n = {n, n, 1, 1};
  return s;
}

const Poly n1 = nu(1), n2 = nu(2), n3 = nu(3);

Poly trilinear() { return n1 * n2 * n3 + n1 * Poly(2L) - n3; }
Poly cubic() { return n1.pow(3) * n3 + n2.pow(3) * n1 - Poly(2L) * n3.pow(3) * n2; }
Poly quartic() { return n1.pow(4) - Poly(6L) * n1 * n2 * n3.pow(2); }

// Solution of (1 + nu2) u_11 + u_22 = 0 in (nu1, nu2) written on nu1, nu2.
Poly r22_sextic() {
  return n1.pow(4) - Poly(6L) * n1.pow(2) * n2.pow(2) - Poly(2L) * n1.pow(2) * n2.pow(3) + n2.pow(4) +
         Poly(Rational(4, 5)) * n2.pow(5) + Poly(Rational(2, 15)) * n2.pow(6);
}

double r31_error(const Poly& p, int n) {
  auto exact = poly_on_axes(p, {1, 2, 3});
  auto sol = solve_r31(r31_box(n), exact);
  return interior_error(sol.field, exact);
}

double r22_error(const Poly& p, int n) {
  auto exact = poly_on_axes(p, {1, 2});
  auto sol = solve_r22(r22_box(n), 1.0, 1.0, exact);
  return interior_error(sol.field, exact);
}

}  // namespace

TEST_CASE("reference solutions satisfy the reduced equations exactly") {
  CHECK(r31_residual(trilinear()).is_zero());
  CHECK(r31_residual(cubic()).is_zero());
  CHECK(r31_residual(quartic()).is_zero());
  const Poly u = r22_sextic();
  CHECK(((Poly(1L) + n2) * u.derivative(1).derivative(1) + u.derivative(2).derivative(2)).is_zero());
}

TEST_CASE("r31 solver reproduces stencil-exact solutions") {
  CHECK(r31_error(trilinear(), 9) < 1e-9);
  CHECK(r31_error(cubic(), 9) < 1e-9);
  auto sol = solve_r31(r31_box(9), poly_on_axes(trilinear(), {1, 2, 3}));
  CHECK(sol.report.iterations > 1);
  CHECK(sol.report.residual_norm < 1e-8);
  auto j = nlohmann::json::parse(sol.report.to_json());
  CHECK(j.contains("iterations"));
  CHECK(j.contains("final_update"));
  CHECK(j.contains("residual_norm"));
}

TEST_CASE("second order convergence on non-polynomial-exact solutions") {
  const double e1 = r31_error(quartic(), 9), e2 = r31_error(quartic(), 17);
  CHECK(e1 > 1e-8);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.125));
  const double f1 = r22_error(r22_sextic(), 17), f2 = r22_error(r22_sextic(), 33);
  CHECK(f1 / f2 == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("constant, linear and harmonic boundary data") {
  auto c = solve_r31(r31_box(7), [](const std::array<double, 4>&) { return 3.5; });
  for (double x : c.field.values) CHECK(x == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(c.report.iterations == 1);

  auto lin = [](const std::array<double, 4>& p) { return 2 * p[0] - p[1] + 0.5 * p[2]; };
  CHECK(interior_error(solve_r31(r31_box(9), lin).field, lin) < 1e-9);

  // With c = 1, d = 0 the r22 operator is the Laplacian.
  auto harm = [](const std::array<double, 4>& p) { return p[0] * p[0] - p[1] * p[1]; };
  CHECK(interior_error(solve_r22(r22_box(17), 1.0, 0.0, harm).field, harm) < 1e-9);
}

TEST_CASE("discrete maximum principle") {
  auto b = [](const std::array<double, 4>& p) { return std::sin(3 * p[0]) * std::cos(2 * p[1]) + p[2]; };
  auto sol = solve_r31(r31_box(11), b);
  double bmin = INFINITY, bmax = -INFINITY, imin = INFINITY, imax = -INFINITY;
  for (std::size_t i = 0; i < sol.field.values.size(); ++i) {
    const double v = sol.field.values[i];
    if (sol.field.boundary[i]) {
      bmin = std::min(bmin, v);
      bmax = std::max(bmax, v);
    } else {
      imin = std::min(imin, v);
      imax = std::max(imax, v);
    }
  }
  CHECK(imin >= bmin - 1e-12);
  CHECK(imax <= bmax + 1e-12);
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
  auto b = poly_on_axes(quartic(), {1, 2, 3});
  SolverOptions par, ser;
  ser.parallel = false;
  auto a = solve_r31(r31_box(13), b, par);
  auto s = solve_r31(r31_box(13), b, ser);
  CHECK(a.report.iterations == s.report.iterations);
  CHECK(a.field.values == s.field.values);
}

TEST_CASE("response to boundary perturbations is linear") {
  auto base = poly_on_axes(quartic(), {1, 2, 3});
  auto bump = [](const std::array<double, 4>& p) { return std::exp(-p[0]) * p[1]; };
  const double eps = 1e-3;
  auto u0 = solve_r31(r31_box(9), base).field;
  auto u1 = solve_r31(r31_box(9), [&](const auto& p) { return base(p) + eps * bump(p); }).field;
  auto du = solve_r31(r31_box(9), bump).field;
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < du.values.size(); ++i) {
    worst = std::max(worst, std::abs((u1.values[i] - u0.values[i]) / eps - du.values[i]));
    scale = std::max(scale, std::abs(du.values[i]));
  }
  CHECK(worst < 0.05 * scale);
}

TEST_CASE("solver refusals") {
  GridSpec bad = r31_box(9);
  bad.lo[2] = -0.5;  // nu3 changes sign, so the nu2 coefficient does too
  CHECK_THROWS_AS(solve_r31(bad, [](const auto&) { return 0.0; }), NonEllipticError);
  CHECK_THROWS_AS(solve_r22(r22_box(9), 0.0, 1.0, [](const auto&) { return 0.0; }), NonEllipticError);
  SolverOptions capped;
  capped.max_iterations = 3;
  capped.history_stride = 1;
  try {
    solve_r31(r31_box(9), poly_on_axes(quartic(), {1, 2, 3}), capped);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual_history.size() == 3);
  }
  CHECK_THROWS_AS(solve_r22(r31_box(9), 1, 1, [](const auto&) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("grid residuals vanish on sampled families") {
  GridSpec s;
  s.dim = 4;
  s.lo = {1, 1, 1, 1};
  s.hi = {1.5, 1.5, 1.5, 1.5};
  s.n = {7, 7, 7, 7};
  for (const auto& name : example_family_names()) {
    CAPTURE(name);
    auto f = example_family(name);
    auto sample = SampledSymField::sample(f.matrix(), s);
    for (const auto& r : grid_residual(sample)) {
      CAPTURE(r.name);
      CHECK(r.max < 1e-10);
    }
    for (const auto& r : grid_residual_diagonal(sample)) {
      CAPTURE(r.name);
      CHECK(r.max < 1e-10);
    }
  }
}

TEST_CASE("grid residual detects a non-solution") {
  GridSpec s = GridSpec::cube(4, 1, 1.5, 5);
  auto v = SymMatrixField::diagonal({nu(1) * nu(1), nu(2), nu(3), nu(0)});
  auto r = grid_residual_diagonal(SampledSymField::sample(v, s));
  CHECK(find_residual(r, "l_red_0").max > 1.0);
  CHECK(find_residual(r, "divergence_0").max == 0.0);
  auto full = grid_residual(SampledSymField::sample(v, s), false);
  CHECK(find_residual(full, "elliptic_00").max > 1.0);
}

TEST_CASE("promoted r31 solution satisfies the diagonal residuals") {
  auto exact = poly_on_axes(quartic(), {1, 2, 3});
  auto sol = solve_r31(r31_box(9), exact);
  auto v = promote_r31(sol.field, 0.0, 1.0, 5);
  auto r = grid_residual_diagonal(v);
  for (const auto& x : r) {
    CAPTURE(x.name);
    CHECK(x.max < 1e-8);
  }
}

TEST_CASE("L-red residual is linear in a perturbation of V0") {
  GridSpec s = GridSpec::cube(4, 1, 1.5, 7);
  auto perturbed = [&](double eps) {
    auto f = example_family("triple-product");
    f.v[0] += (nu(1) * nu(1) * nu(2)).scaled(Rational(eps));
    return find_residual(grid_residual_diagonal(SampledSymField::sample(f.matrix(), s)), "l_red_0").max;
  };
  const double r1 = perturbed(1e-3), r2 = perturbed(2e-3);
  CHECK(r1 > 0.0);
  CHECK(r2 / r1 == doctest::Approx(2.0).epsilon(0.05));
}
