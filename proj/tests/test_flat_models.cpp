#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "spin7/flat_models.hpp"
#include "spin7/riemann.hpp"

using namespace spin7;

namespace {

GenMask mask(const std::vector<int>& gens) {
  unsigned m = 0;
  for (int g : gens) m |= 1u << g;
  return static_cast<GenMask>(m);
}

// Coefficients of Phi expanded independently from the complex displays (frozen).
PolyForm expected_phi(FlatKind k) {
  struct T {
    std::vector<int> g;
    int c;
  };
  std::vector<T> t2 = {{{0, 1, 2, 3}, 1},  {{0, 1, 4, 5}, 1},  {{0, 1, 6, 7}, 1},  {{0, 2, 4, 6}, 1},  {{0, 2, 5, 7}, -1},
                       {{0, 3, 4, 7}, -1}, {{0, 3, 5, 6}, -1}, {{1, 2, 4, 7}, -1}, {{1, 2, 5, 6}, -1}, {{1, 3, 4, 6}, -1},
                       {{1, 3, 5, 7}, 1},  {{2, 3, 4, 5}, 1},  {{2, 3, 6, 7}, 1},  {{4, 5, 6, 7}, 1}};
  std::vector<T> s1 = {{{0, 1, 2, 3}, 1},  {{1, 2, 4, 5}, 1},  {{1, 2, 6, 7}, 1},  {{0, 3, 4, 5}, -1}, {{0, 3, 6, 7}, -1},
                       {{0, 1, 4, 6}, -1}, {{0, 1, 5, 7}, 1},  {{0, 2, 4, 7}, -1}, {{0, 2, 5, 6}, -1}, {{1, 3, 4, 7}, -1},
                       {{1, 3, 5, 6}, -1}, {{2, 3, 4, 6}, 1},  {{2, 3, 5, 7}, -1}, {{4, 5, 6, 7}, -1}};
  PolyForm f;
  for (const auto& e : (k == FlatKind::stab_t2 ? t2 : s1)) f.add_term(mask(e.g), Poly(static_cast<long>(e.c)));
  return f;
}

std::array<double, 8> random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 8> p;
  for (auto& x : p) x = u(rng);
  return p;
}

Tensor4 constant_phi_tensor(const PolyForm& phi) {
  Tensor4 t;
  for (const auto& [m, c] : phi.terms()) {
    std::array<int, 4> idx{};
    int n = 0;
    for (int g = 0; g < 8; ++g) {
      if (m & (1u << g)) idx[n++] = g;
    }
    const double v = c.constant_term().get_d();
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
      int inv = 0;
      for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) inv += perm[i] > perm[j];
      t(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]) = inv % 2 ? -v : v;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return t;
}

const FlatKind kinds[] = {FlatKind::stab_t2, FlatKind::stab_s1};

}  // namespace

TEST_CASE("flat model Phi matches the expanded displays") {
  for (FlatKind k : kinds) {
    auto m = flat_model(k);
    CHECK(m.phi == expected_phi(k));
    CHECK(m.phi.terms().size() == 14);
    CHECK(d_flat(m.phi).is_zero());
    // Self-dual for the orientation Phi ^ Phi > 0, which is the coordinate one for stab-T2
    // and the opposite one for stab-S1.
    const PolyForm star = hodge_star(m.phi, 0xff);
    CHECK(star == (k == FlatKind::stab_t2 ? m.phi : -m.phi));
    const Rational top = wedge(m.phi, m.phi).coefficient(0xff).constant_term();
    CHECK(top == (k == FlatKind::stab_t2 ? 14 : -14));
  }
  CHECK(to_string(parse_flat_kind("stab-T2")) == "stab-T2");
  CHECK_THROWS_AS(parse_flat_kind("stab-T3"), std::invalid_argument);
}

TEST_CASE("moment map values") {
  auto t2 = flat_model(FlatKind::stab_t2);
  const double p[8] = {0, 0, 1, 0, 0, 1, 1, 0};  // z = (1, i, 1)
  const double want_t2[4] = {1, 0, 0, 0};
  for (int i = 0; i < 4; ++i) CHECK(t2.nu[i].evaluate(p) == doctest::Approx(want_t2[i]));
  auto s1 = flat_model(FlatKind::stab_s1);
  const double q[8] = {0, 0, 0, 2, 1, 0, 1, 0};
  const double want_s1[4] = {0, -1, 0, -2};
  for (int i = 0; i < 4; ++i) CHECK(s1.nu[i].evaluate(q) == doctest::Approx(want_s1[i]));

  const double origin[8] = {0.3, -0.2, 0, 0, 0, 0, 0, 0};
  for (int g = 0; g < 8; ++g) {
    CHECK(t2.u[2][g].evaluate(origin) == 0.0);
    CHECK(t2.u[3][g].evaluate(origin) == 0.0);
  }
}

TEST_CASE("moment identities hold exactly and numerically") {
  std::mt19937 rng(8);
  for (FlatKind k : kinds) {
    auto m = flat_model(k);
    for (const auto& r : moment_identity_residuals(m)) CHECK(r.is_zero());
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      auto p = random_point(rng);
      worst = std::max(worst, verify_moment_identities(m, p).defect);
    }
    CHECK(worst < 1e-10);

    auto p = random_point(rng);
    auto base = verify_moment_identities(m, p);
    FlatModel doubled = m;
    doubled.phi = m.phi.scaled(Poly(2L));
    auto twice = verify_moment_identities(doubled, p);
    CHECK(twice.contraction_norm == doctest::Approx(2 * base.contraction_norm));
    CHECK(twice.defect == doctest::Approx(base.contraction_norm));
  }
}

TEST_CASE("torus action: brackets, invariance, isotropy") {
  for (FlatKind k : kinds) {
    auto m = flat_model(k);
    for (int i = 0; i < 4; ++i) {
      CHECK(lie_derivative(m.u[i], m.phi).is_zero());
      for (int j = 0; j < 4; ++j) {
        auto b = bracket(m.u[i], m.u[j]);
        for (const auto& c : b) CHECK(c.is_zero());
        CHECK(derivative_along(m.u[i], m.nu[j]).is_zero());
      }
    }
    CHECK(orbit_restriction(m).is_zero());
  }
}

TEST_CASE("rotation generators lie in spin(7)") {
  auto m = flat_model(FlatKind::stab_t2);
  Tensor4 phi = constant_phi_tensor(m.phi);
  for (int j : {2, 3}) {
    Mat8 s = Mat8::Zero();
    for (int g = 0; g < 8; ++g)
      for (int h = 0; h < 8; ++h) s(g, h) = m.u[j][g].derivative(h).constant_term().get_d();
    CHECK((s + s.transpose()).norm() == 0.0);
    auto r = spin7_membership(s, phi, 1e-10);
    CHECK(r.member);
  }
  // A rotation in a single complex plane is not in the stabilizer.
  Mat8 s = Mat8::Zero();
  s(3, 2) = 1;
  s(2, 3) = -1;
  CHECK_FALSE(spin7_membership(s, phi).member);
}

TEST_CASE("singular graph of the T2 model") {
  auto m = flat_model(FlatKind::stab_t2);
  NuBox box{{-2, -2, -2, -2}, {2, 2, 2, 2}};
  auto g = singular_graph(m, box);
  REQUIRE(g.vertices.size() == 1);
  CHECK(g.vertices[0] == std::array<double, 4>{0, 0, 0, 0});
  REQUIRE(g.edges.size() == 3);
  std::array<long, 4> sum{};
  std::set<std::array<long, 4>> dirs, stabs;
  for (const auto& e : g.edges) {
    CHECK_FALSE(e.full_line);
    CHECK(e.dir[0] == 0);
    CHECK(e.dir[1] == 0);
    for (int a = 0; a < 4; ++a) sum[a] += e.dir[a];
    dirs.insert(e.dir);
    stabs.insert(e.stabilizer);
    CHECK(e.t_min == 0.0);
    CHECK(e.t_max == doctest::Approx(2.0));
  }
  CHECK(sum == std::array<long, 4>{0, 0, 0, 0});
  CHECK(g.balanced());
  CHECK(dirs == std::set<std::array<long, 4>>{{0, 0, -1, 0}, {0, 0, 0, 1}, {0, 0, 1, -1}});
  CHECK(stabs == std::set<std::array<long, 4>>{{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 1, -1}});
  // Each stabilizer vanishes on its family.
  for (const auto& e : g.edges) {
    VectorField w;
    for (int j = 0; j < 4; ++j)
      for (int c = 0; c < 8; ++c) w[c] += m.u[j][c].scaled(e.stabilizer[j]);
    std::array<double, 8> pt{};
    int plane = e.dir == std::array<long, 4>{0, 0, 0, 1} ? 0 : e.dir == std::array<long, 4>{0, 0, -1, 0} ? 1 : 2;
    pt[m.planes[plane].first] = 0.7;
    pt[m.planes[plane].second] = -0.4;
    for (int c = 0; c < 8; ++c) CHECK(w[c].evaluate(pt) == 0.0);
  }
}

TEST_CASE("singular graph of the S1 model") {
  auto m = flat_model(FlatKind::stab_s1);
  auto g = singular_graph(m, NuBox{});
  REQUIRE(g.edges.size() == 1);
  const auto& e = g.edges[0];
  CHECK(e.full_line);
  CHECK(e.dir == std::array<long, 4>{0, 0, 0, 1});
  CHECK(e.stabilizer == std::array<long, 4>{0, 0, 0, 1});
  CHECK(e.t_min == doctest::Approx(-1.0));
  CHECK(e.t_max == doctest::Approx(1.0));

  const double p[8] = {0, 0, 0, 0.5, 0, 0, 0, 0};
  auto shifted = singular_graph(m, NuBox{}, p);
  CHECK(shifted.vertices[0][3] == doctest::Approx(-0.5));
}

TEST_CASE("graph export") {
  auto g = singular_graph(flat_model(FlatKind::stab_t2), NuBox{});
  auto j = nlohmann::json::parse(g.to_json());
  CHECK(j["vertices"].size() == 1);
  CHECK(j["edges"].size() == 3);
  CHECK(j["edges"][0].contains("from"));
  CHECK(j["edges"][0].contains("dir"));
  CHECK(j["edges"][0].contains("stabilizer"));
  std::ostringstream os;
  g.write_csv(os, 5);
  std::string s = os.str();
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 3 * 5);
}
