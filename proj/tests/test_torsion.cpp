#include "doctest.h"
#include "spin7/errors.hpp"
#include "spin7/torsion.hpp"
#include "test_util.hpp"

using namespace spin7;
using F = PolyForm;

namespace {

SymMatrixField linear_cycle() { return SymMatrixField::diagonal({nu(1), nu(2), nu(3), nu(0)}); }
SymMatrixField triple_product() { return SymMatrixField::diagonal({nu(1) * nu(2) * nu(3), nu(2), nu(3), nu(1)}); }
SymMatrixField cubic() {
  Poly v0 = nu(1).pow(3) * nu(3) + nu(2).pow(3) * nu(1) - nu(3).pow(3) * nu(2).scaled(2);
  return SymMatrixField::diagonal({v0, nu(2), nu(3), nu(1)});
}

F dnu2(int i, int j) { return wedge(F::dnu(i), F::dnu(j)); }

bool all_zero(const SymPolyMatrix& m) {
  for (const auto& row : m) {
    for (const auto& e : row) {
      if (!e.is_zero()) return false;
    }
  }
  return true;
}

RationalMatrix4 random_invertible(std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-4, 4), den(1, 3);
  while (true) {
    RationalMatrix4 m;
    for (auto& row : m) {
      for (auto& x : row) {
        x = Rational(num(rng), den(rng));
        x.canonicalize();
      }
    }
    if (det4(m) != 0) return m;
  }
}

}  // namespace

TEST_CASE("divergence residual examples") {
  for (const auto& r : divergence_residual(linear_cycle())) CHECK(r.is_zero());
  auto r = divergence_residual(SymMatrixField::diagonal({nu(0), Poly(1L), Poly(1L), Poly(1L)}));
  CHECK(r[0] == Poly(1L));
  CHECK(r[1].is_zero());
  CHECK(r[2].is_zero());
  CHECK(r[3].is_zero());
  std::mt19937 rng(21);
  for (int t = 0; t < 10; ++t) CHECK(is_divergence_free(testing::termwise_divergence_free(rng)));
}

TEST_CASE("curvature of the identity and the linear cycle") {
  CurvatureSet id = curvature_matrices(SymMatrixField::identity());
  for (int l = 0; l < 4; ++l) CHECK(id.omega(l).is_zero());
  CurvatureSet cs = curvature_matrices(linear_cycle());
  CHECK(cs.omega(0) == dnu2(2, 3).scaled(-nu(2)));
  CHECK(cs.omega(1) == dnu2(3, 0).scaled(nu(3)));
  CHECK(cs.omega(2) == dnu2(0, 1).scaled(-nu(0)));
  CHECK(cs.omega(3) == dnu2(1, 2).scaled(nu(1)));
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) CHECK(cs.z[l][i][j] == -cs.z[l][j][i]);
    }
  }
}

TEST_CASE("closed-form curvature matches the closedness solve") {
  std::mt19937 rng(22);
  std::vector<std::vector<Rational>> pts = {testing::point4(1, 2, -1, 3), {Rational(1, 2), 0, Rational(-2, 3), 1}};
  for (int t = 0; t < 6; ++t) {
    SymMatrixField v = (t % 2) ? testing::random_divergence_free(rng) : testing::termwise_divergence_free(rng);
    REQUIRE(is_divergence_free(v));
    CurvatureSet cs = curvature_matrices(v);
    for (const auto& p : pts) {
      auto z = solve_curvature_at(v, p);
      REQUIRE(z.has_value());
      CHECK(*z == evaluate_curvature(cs, p));
    }
  }
}

TEST_CASE("closedness is inconsistent where the divergence does not vanish") {
  auto v = SymMatrixField::diagonal({nu(0) + Poly(3L), Poly(1L), Poly(2L), Poly(1L)});
  CHECK_FALSE(solve_curvature_at(v, testing::point4(1, 1, 1, 1)).has_value());
}

TEST_CASE("dPhi oracle on the examples") {
  auto id = SymMatrixField::identity();
  CHECK(oracle_dphi(id, curvature_matrices(id)).is_zero());
  auto lc = linear_cycle();
  CHECK(oracle_dphi(lc, curvature_matrices(lc)).is_zero());
  auto bad = SymMatrixField::diagonal({nu(0), Poly(1L), Poly(1L), Poly(1L)});
  RationalForm e = oracle_dphi(bad, curvature_matrices(bad));
  CHECK_FALSE(e.is_zero());
  CHECK(e.degree() == 5);
  auto p = testing::point4(2, 1, 3, 1);
  DivergenceFactorization f = divergence_factorization(bad, p);
  CHECK(f.spanned);
  CHECK_FALSE(f.dphi.empty());
  for (std::size_t r = 0; r < f.masks.size(); ++r) {
    Rational pred = 0;
    for (int j = 0; j < 4; ++j) pred += f.factor[r][j] * f.residual[j];
    auto it = f.dphi.find(f.masks[r]);
    CHECK(pred == (it == f.dphi.end() ? Rational(0) : it->second));
  }
}

TEST_CASE("dPhi failure is spanned by divergence residuals for random fields") {
  std::mt19937 rng(23);
  for (int t = 0; t < 4; ++t) {
    SymMatrixField v = testing::random_field(rng, 2, 8);
    auto p = testing::point4(1, -1, 2, 1);
    DivergenceFactorization f = divergence_factorization(v, p);
    CHECK(f.spanned);
    for (std::size_t r = 0; r < f.masks.size(); ++r) {
      Rational pred = 0;
      for (int j = 0; j < 4; ++j) pred += f.factor[r][j] * f.residual[j];
      auto it = f.dphi.find(f.masks[r]);
      CHECK(pred == (it == f.dphi.end() ? Rational(0) : it->second));
    }
  }
}

TEST_CASE("dPhi vanishes exactly iff V is divergence free") {
  std::mt19937 rng(24);
  int free_count = 0, other = 0;
  for (int t = 0; t < 20; ++t) {
    SymMatrixField v = (t % 2 == 0) ? testing::termwise_divergence_free(rng) : testing::random_field(rng, 2, 6);
    bool div_free = is_divergence_free(v);
    (div_free ? free_count : other)++;
    CHECK(oracle_dphi(v, curvature_matrices(v)).is_zero() == div_free);
  }
  CHECK(free_count >= 10);
  CHECK(other >= 5);
}

TEST_CASE("elliptic residual examples") {
  CHECK(all_zero(elliptic_residual(SymMatrixField::identity())));
  CHECK(all_zero(elliptic_residual(triple_product())));
  CHECK(all_zero(elliptic_residual(linear_cycle())));
  CHECK(all_zero(elliptic_residual(cubic())));
  // L_00 for diag(nu1^2, 1, 1, 1) against central differences of sum V_ij d_i d_j V_00.
  auto v = SymMatrixField::diagonal({nu(1) * nu(1), Poly(1L), Poly(1L), Poly(1L)});
  Rational exact = operator_L(v)[0][0].evaluate(testing::point4(1, 1, 1, 1));
  const double h = 1e-3;
  auto f = [](double x1) { return x1 * x1; };
  double fd = 1.0 * (f(1 + h) - 2 * f(1) + f(1 - h)) / (h * h);
  CHECK(std::abs(fd - exact.get_d()) < 1e-6);
}

TEST_CASE("Q is quadratic and L has no zeroth order term") {
  std::mt19937 rng(25);
  for (int t = 0; t < 5; ++t) {
    SymMatrixField v = testing::random_field(rng, 2, 3);
    PolyMatrix4 scaled{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) scaled[i][j] = v(i, j).scaled(3);
    }
    auto q1 = operator_Q(v), q3 = operator_Q(SymMatrixField(scaled));
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) CHECK(q3[i][j] == q1[i][j].scaled(9));
    }
  }
  PolyMatrix4 c{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) c[i][j] = Poly(static_cast<long>(i == j ? 5 : i + j));
  }
  CHECK(all_zero(elliptic_residual(SymMatrixField(c))));
}

TEST_CASE("d omega corresponds to the elliptic residual on divergence-free fields") {
  std::mt19937 rng(26);
  const auto& c = stored_correspondence();
  QMatrix pinv = correspondence_left_inverse();
  for (int t = 0; t < 6; ++t) {
    SymMatrixField v = testing::random_divergence_free(rng, 3);
    auto e = elliptic_residual(v);
    auto w = domega_components(v);
    for (int r = 0; r < 16; ++r) {
      Poly pred;
      for (int k = 0; k < 10; ++k) {
        auto [a, b] = upper_pairs()[k];
        if (c[r][k] != 0) pred += e[a][b].scaled(c[r][k]);
      }
      CHECK(pred == w[r]);
    }
    for (int k = 0; k < 10; ++k) {
      Poly back;
      for (int r = 0; r < 16; ++r) back += w[r].scaled(pinv[k][r]);
      auto [a, b] = upper_pairs()[k];
      CHECK(back == e[a][b]);
    }
    bool dw_zero = true;
    for (const auto& x : w) dw_zero = dw_zero && x.is_zero();
    CHECK(dw_zero == all_zero(e));
  }
  for (const auto& f : {triple_product(), linear_cycle(), cubic()}) {
    for (const auto& x : oracle_domega(f)) CHECK(x.is_zero());
  }
}

TEST_CASE("the stored correspondence is recomputed from samples") {
  std::mt19937 rng(27);
  std::vector<SymMatrixField> fields;
  for (int t = 0; t < 6; ++t) fields.push_back(testing::random_divergence_free(rng, 4));
  std::vector<std::vector<Rational>> pts = {testing::point4(1, 2, 3, 4), testing::point4(-1, 0, 2, 1),
                                            testing::point4(2, -3, 1, 0), {Rational(1, 2), 1, Rational(1, 3), -1},
                                            testing::point4(0, 1, -2, 3)};
  auto c = recompute_correspondence(fields, pts);
  REQUIRE(c.has_value());
  for (int r = 0; r < 16; ++r) {
    for (int k = 0; k < 10; ++k) CHECK((*c)[r][k] == stored_correspondence()[r][k]);
  }
}

TEST_CASE("closed-form formulas agree with the oracles") {
  std::mt19937 rng(28);
  std::vector<SymMatrixField> fields{linear_cycle(), triple_product()};
  for (int t = 0; t < 3; ++t) fields.push_back(testing::random_divergence_free(rng));
  auto devs = formula_deviations(fields, {testing::point4(1, 2, 3, 4), testing::point4(2, 1, -1, 1)});
  CHECK(devs.empty());
  CHECK(deviations_json(devs) == "[]");
  Deviation d{"curvature_leading", {0, 0, 1}, "1", "2"};
  CHECK(deviations_json({d}).find("\"formula_id\": \"curvature_leading\"") != std::string::npos);
}

TEST_CASE("GL(4) action basics") {
  auto lc = linear_cycle();
  SymMatrixField same = gl4_transform(lc, GL4Action::identity());
  CHECK(same.matrix() == lc.matrix());
  std::mt19937 rng(29);
  GL4Action a(random_invertible(rng)), b(random_invertible(rng));
  auto v = testing::random_field(rng, 2, 4);
  CHECK(gl4_transform(gl4_transform(v, b), a).matrix() == gl4_transform(v, a.compose(b)).matrix());
  RationalMatrix4 sing{};
  CHECK_THROWS_AS(GL4Action{sing}, std::invalid_argument);
}

TEST_CASE("permutations map the linear cycle to solutions") {
  int perm[4] = {0, 1, 2, 3};
  int count = 0;
  do {
    RationalMatrix4 m{};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) m[i][j] = (perm[i] == j) ? 1 : 0;
    }
    auto w = gl4_transform(linear_cycle(), GL4Action(m));
    CHECK(is_divergence_free(w));
    CHECK(all_zero(elliptic_residual(w)));
    ++count;
  } while (std::next_permutation(perm, perm + 4));
  CHECK(count == 24);
}

TEST_CASE("Phi is invariant under the induced action") {
  std::mt19937 rng(30);
  for (int t = 0; t < 3; ++t) {
    GL4Action g(random_invertible(rng));
    auto v = testing::random_field(rng, 1, 5);
    RationalForm phi = assemble_phi(v);
    RationalForm phi2 = assemble_phi(gl4_transform(v, g));
    RationalMatrix4 tm = g.theta_map(), nm = g.nu_map();
    std::array<F, 8> img;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        img[theta_gen(i)] += F::theta(j).scaled(Poly(tm[i][j]));
        img[dnu_gen(i)] += F::dnu(j).scaled(Poly(nm[i][j]));
      }
    }
    F num2;
    for (const auto& [m, c] : phi2.num.terms()) num2 += F::basis(m, pull_back_to_nu(c, g));
    num2 = substitute_generators(num2, img);
    Poly den2 = pull_back_to_nu(phi2.den, g);
    CHECK(num2.scaled(phi.den) == phi.num.scaled(den2));
  }
}

TEST_CASE("elliptic residual scales with a single weight") {
  std::mt19937 rng(31);
  std::vector<SymMatrixField> fields{SymMatrixField::diagonal({nu(1) * nu(1), nu(0), Poly(1L), nu(2)})};
  for (int t = 0; t < 3; ++t) fields.push_back(testing::random_divergence_free(rng));
  for (int t = 0; t < 2; ++t) fields.push_back(testing::random_field(rng, 2, 3));
  for (const auto& v : fields) {
    CHECK(elliptic_scaling_weight(v, 2) == std::optional<int>(-10));
    CHECK(elliptic_scaling_weight(v, Rational(1, 3)) == std::optional<int>(-10));
  }
}

TEST_CASE("elliptic residual is equivariant on divergence-free fields") {
  std::mt19937 rng(32);
  for (int t = 0; t < 3; ++t) {
    GL4Action g(random_invertible(rng));
    auto v = testing::random_divergence_free(rng);
    auto e = elliptic_residual(v);
    auto e2 = elliptic_residual(gl4_transform(v, g));
    RationalMatrix4 ainv = inverse4(g.a);
    Rational s = 1 / (g.det() * g.det());
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        Poly expect;
        for (int a = 0; a < 4; ++a) {
          for (int b = 0; b < 4; ++b) expect += e[a][b].scaled(s * ainv[a][i] * ainv[b][j]);
        }
        CHECK(pull_back_to_nu(e2[i][j], g) == expect);
      }
    }
  }
}
