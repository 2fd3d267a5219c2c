#include "spin7/flat_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "spin7/linalg_exact.hpp"

namespace spin7 {

namespace {

// Complex-valued form re + i im.
struct CForm {
  PolyForm re, im;
};

CForm operator+(const CForm& a, const CForm& b) { return {a.re + b.re, a.im + b.im}; }
CForm cwedge(const CForm& a, const CForm& b) {
  return {wedge(a.re, b.re) - wedge(a.im, b.im), wedge(a.re, b.im) + wedge(a.im, b.re)};
}
CForm times_i(const CForm& a) { return {-a.im, a.re}; }
CForm real(const PolyForm& a) { return {a, PolyForm()}; }

PolyForm dq(int g) { return PolyForm::generator(g); }
CForm dz(int re, int im) { return {dq(re), dq(im)}; }
CForm dzbar(int re, int im) { return {dq(re), -dq(im)}; }

// Sum over the planes of dz ^ dzbar.
CForm kahler_sum(const std::vector<std::pair<int, int>>& planes) {
  CForm s;
  for (auto [re, im] : planes) s = s + cwedge(dz(re, im), dzbar(re, im));
  return s;
}

PolyForm require_real(const CForm& f) {
  if (!f.im.is_zero()) throw std::logic_error("expected a real form");
  return f.re;
}

// Infinitesimal rotation x d/dy - y d/dx in the plane (x, y), scaled by w.
void add_rotation(VectorField& u, std::pair<int, int> plane, long w) {
  auto [x, y] = plane;
  u[y] += Poly::variable(x).scaled(w);
  u[x] -= Poly::variable(y).scaled(w);
}

FlatModel model_t2() {
  FlatModel m;
  m.kind = FlatKind::stab_t2;
  m.coordinate_names = {"x", "y", "x1", "y1", "x2", "y2", "x3", "y3"};
  m.translation_coords = {0, 1};
  m.planes = {{2, 3}, {4, 5}, {6, 7}};
  const auto& pl = m.planes;
  const CForm omega = kahler_sum(pl);
  const CForm triple = cwedge(cwedge(dz(2, 3), dz(4, 5)), dz(6, 7));
  PolyForm phi = require_real(times_i(cwedge(real(wedge(dq(0), dq(1))), omega))).scaled(Rational(1, 2));
  phi += wedge(dq(0), triple.re);
  phi -= wedge(dq(1), triple.im);
  phi -= require_real(cwedge(omega, omega)).scaled(Rational(1, 8));
  m.phi = phi;

  m.u[0][0] = Poly(1L);
  m.u[1][1] = Poly(1L);
  add_rotation(m.u[2], pl[0], 1);
  add_rotation(m.u[2], pl[2], -1);
  add_rotation(m.u[3], pl[1], 1);
  add_rotation(m.u[3], pl[2], -1);

  // z1 z2 z3 expanded in real and imaginary parts.
  auto q = [](int i) { return Poly::variable(i); };
  Poly pr = q(2) * q(4) - q(3) * q(5), pi = q(2) * q(5) + q(3) * q(4);
  Poly zr = pr * q(6) - pi * q(7), zi = pr * q(7) + pi * q(6);
  auto abs2 = [&](std::pair<int, int> p) { return q(p.first).pow(2) + q(p.second).pow(2); };
  m.nu = {zi, zr, (abs2(pl[1]) - abs2(pl[2])).scaled(Rational(-1, 2)),
          (abs2(pl[0]) - abs2(pl[2])).scaled(Rational(1, 2))};
  return m;
}

FlatModel model_s1() {
  FlatModel m;
  m.kind = FlatKind::stab_s1;
  m.coordinate_names = {"x1", "x2", "x3", "u", "xz", "yz", "xw", "yw"};
  m.translation_coords = {0, 1, 2, 3};
  m.planes = {{4, 5}, {6, 7}};
  const auto& pl = m.planes;
  const CForm omega = kahler_sum(pl);
  PolyForm phi = wedge(wedge(dq(0), dq(1)), wedge(dq(2), dq(3)));
  phi += wedge(wedge(dq(1), dq(2)) - wedge(dq(0), dq(3)), require_real(times_i(omega)).scaled(Rational(1, 2)));
  const CForm c{dq(1), -dq(2)};
  const CForm t = cwedge(cwedge(c, dz(4, 5)), dz(6, 7));
  phi -= wedge(dq(0), t.re);
  phi += wedge(dq(3), t.im);
  phi += require_real(cwedge(omega, omega)).scaled(Rational(1, 8));
  m.phi = phi;

  m.u[0][0] = Poly(1L);
  m.u[1][1] = Poly(1L);
  m.u[2][2] = Poly(1L);
  add_rotation(m.u[3], pl[0], -1);
  add_rotation(m.u[3], pl[1], 1);

  auto q = [](int i) { return Poly::variable(i); };
  Poly wr = q(4) * q(6) - q(5) * q(7), wi = q(4) * q(7) + q(5) * q(6);
  m.nu = {(q(4).pow(2) + q(5).pow(2) - q(6).pow(2) - q(7).pow(2)).scaled(Rational(1, 2)), -wr, -wi, -q(3)};
  return m;
}

double max_abs_of(const PolyForm& f, std::span<const double> p) {
  double w = 0.0;
  for (const auto& [m, c] : f.terms()) w = std::max(w, std::abs(c.evaluate(p)));
  return w;
}

std::array<long, 4> primitive(const QVector& v) {
  mpz_class l = 1;
  for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  std::vector<mpz_class> ints;
  mpz_class g = 0;
  for (const auto& x : v) {
    mpz_class n = x.get_num() * (l / x.get_den());
    ints.push_back(n);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
  }
  std::array<long, 4> out{};
  if (g == 0) return out;
  for (std::size_t i = 0; i < 4 && i < ints.size(); ++i) out[i] = mpz_class(ints[i] / g).get_si();
  return out;
}

// Sign convention: first nonzero entry positive.
void orient(std::array<long, 4>& v) {
  auto first = std::find_if(v.begin(), v.end(), [](long x) { return x != 0; });
  if (first != v.end() && *first < 0) {
    for (auto& x : v) x = -x;
  }
}

// Clipped parameter range of nu0 + t dir inside the box.
std::pair<double, double> clip(const std::array<double, 4>& v, const std::array<long, 4>& dir, const NuBox& box) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 4; ++a) {
    if (dir[a] == 0) continue;
    double t1 = (box.lo[a] - v[a]) / dir[a], t2 = (box.hi[a] - v[a]) / dir[a];
    lo = std::max(lo, std::min(t1, t2));
    hi = std::min(hi, std::max(t1, t2));
  }
  return {lo, hi};
}

}  // namespace

std::string to_string(FlatKind k) { return k == FlatKind::stab_t2 ? "stab-T2" : "stab-S1"; }

FlatKind parse_flat_kind(const std::string& s) {
  if (s == "stab-T2") return FlatKind::stab_t2;
  if (s == "stab-S1") return FlatKind::stab_s1;
  throw std::invalid_argument("unknown flat model: " + s);
}

FlatModel flat_model(FlatKind kind) { return kind == FlatKind::stab_t2 ? model_t2() : model_s1(); }

Poly derivative_along(const VectorField& u, const Poly& f) {
  Poly s;
  for (int g = 0; g < kNumGenerators; ++g) {
    if (!u[g].is_zero()) s += u[g] * f.derivative(g);
  }
  return s;
}

VectorField bracket(const VectorField& a, const VectorField& b) {
  VectorField r;
  for (int g = 0; g < kNumGenerators; ++g) r[g] = derivative_along(a, b[g]) - derivative_along(b, a[g]);
  return r;
}

PolyForm lie_derivative(const VectorField& u, const PolyForm& a) {
  return d_flat(contract(u, a)) + contract(u, d_flat(a));
}

PolyForm gradient(const Poly& f) {
  PolyForm r;
  for (int g = 0; g < kNumGenerators; ++g) r.add_term(static_cast<GenMask>(1u << g), f.derivative(g));
  return r;
}

PolyForm triple_contraction(const FlatModel& m, int i) {
  const int j = (i + 1) % 4, k = (i + 2) % 4, l = (i + 3) % 4;
  return contract(m.u[l], contract(m.u[k], contract(m.u[j], m.phi)));
}

std::array<PolyForm, 4> moment_identity_residuals(const FlatModel& m) {
  std::array<PolyForm, 4> r;
  for (int i = 0; i < 4; ++i) {
    PolyForm c = triple_contraction(m, i);
    r[i] = gradient(m.nu[i]) - (i % 2 ? -c : c);
  }
  return r;
}

MomentDefect verify_moment_identities(const FlatModel& m, std::span<const double> p) {
  MomentDefect out;
  for (int i = 0; i < 4; ++i) {
    PolyForm c = triple_contraction(m, i);
    PolyForm r = gradient(m.nu[i]) - (i % 2 ? -c : c);
    out.defect = std::max(out.defect, max_abs_of(r, p));
    out.contraction_norm = std::max(out.contraction_norm, max_abs_of(c, p));
  }
  return out;
}

Poly orbit_restriction(const FlatModel& m) {
  PolyForm f = contract(m.u[3], contract(m.u[2], contract(m.u[1], contract(m.u[0], m.phi))));
  return f.coefficient(0);
}

bool SingularGraph::balanced() const {
  for (std::size_t v = 0; v < vertices.size(); ++v) {
    int rays = 0;
    std::array<long, 4> sum{};
    for (const auto& e : edges) {
      if (e.from != static_cast<int>(v) || e.full_line) continue;
      ++rays;
      for (int a = 0; a < 4; ++a) sum[a] += e.dir[a];
    }
    if (rays == 3 && sum != std::array<long, 4>{}) return false;
  }
  return true;
}

std::string SingularGraph::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["vertices"] = vertices;
  auto es = nlohmann::ordered_json::array();
  for (const auto& e : edges) {
    nlohmann::ordered_json o;
    o["from"] = e.from;
    o["dir"] = e.dir;
    o["stabilizer"] = e.stabilizer;
    o["kind"] = e.full_line ? "line" : "ray";
    o["t_range"] = {e.t_min, e.t_max};
    es.push_back(o);
  }
  j["edges"] = es;
  return j.dump(2);
}

void SingularGraph::write_csv(std::ostream& os, int samples_per_edge) const {
  if (samples_per_edge < 2) throw std::invalid_argument("need at least two samples per edge");
  os << "edge,t,nu0,nu1,nu2,nu3\n";
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    const auto& v = vertices.at(e.from);
    for (int s = 0; s < samples_per_edge; ++s) {
      double t = e.t_min + (e.t_max - e.t_min) * s / (samples_per_edge - 1);
      os << k << "," << t;
      for (int a = 0; a < 4; ++a) os << "," << v[a] + t * e.dir[a];
      os << "\n";
    }
  }
}

SingularGraph singular_graph(const FlatModel& m, const NuBox& box, std::span<const double> p) {
  std::array<Rational, 8> base{};
  for (std::size_t i = 0; i < p.size() && i < 8; ++i) base[i] = p[i];
  for (auto [re, im] : m.planes) base[re] = base[im] = 0;
  std::array<double, 4> vertex{};
  for (int a = 0; a < 4; ++a) vertex[a] = m.nu[a].evaluate(std::span<const Rational>(base)).get_d();

  // Rotation weight of generator g on plane k, and the constant translation parts.
  const int np = static_cast<int>(m.planes.size());
  auto weight = [&](int g, int k) { return m.u[g][m.planes[k].second].derivative(m.planes[k].first).constant_term(); };
  auto translation = [&](int g, int t) { return m.u[g][t].evaluate(std::span<const Rational>(base)); };

  SingularGraph graph;
  graph.vertices.push_back(vertex);
  for (unsigned subset = 0; subset < (1u << np); ++subset) {
    QMatrix rows;
    for (int t : m.translation_coords) {
      QVector r(4);
      for (int g = 0; g < 4; ++g) r[g] = translation(g, t);
      rows.push_back(r);
    }
    for (int k = 0; k < np; ++k) {
      if (!(subset & (1u << k))) continue;
      QVector r(4);
      for (int g = 0; g < 4; ++g) r[g] = weight(g, k);
      rows.push_back(r);
    }
    auto ker = nullspace(rows, 4);
    if (ker.size() != 1) continue;

    // Directions swept by the fixed set: translations move nu linearly, each free
    // plane moves it quadratically along nu(unit point) - nu(base).
    std::vector<std::pair<QVector, bool>> dirs;
    for (int t : m.translation_coords) {
      QVector dv(4);
      bool any = false;
      for (int a = 0; a < 4; ++a) {
        dv[a] = m.nu[a].derivative(t).evaluate(std::span<const Rational>(base));
        any = any || dv[a] != 0;
      }
      if (any) dirs.push_back({dv, true});
    }
    for (int k = 0; k < np; ++k) {
      if (!(subset & (1u << k))) continue;
      auto pt = base;
      pt[m.planes[k].first] = 1;
      QVector dv(4);
      for (int a = 0; a < 4; ++a) {
        dv[a] = m.nu[a].evaluate(std::span<const Rational>(pt)) - m.nu[a].evaluate(std::span<const Rational>(base));
      }
      dirs.push_back({dv, false});
    }
    QMatrix span_rows;
    for (const auto& [dv, line] : dirs) span_rows.push_back(dv);
    if (dirs.empty() || rank(span_rows, 4) != 1) continue;

    GraphEdge e;
    e.dir = primitive(dirs.front().first);
    e.full_line = std::any_of(dirs.begin(), dirs.end(), [](const auto& d) { return d.second; });
    if (e.full_line) orient(e.dir);
    e.stabilizer = primitive(ker.front());
    orient(e.stabilizer);
    auto [lo, hi] = clip(vertex, e.dir, box);
    e.t_min = e.full_line ? lo : std::max(0.0, lo);
    e.t_max = hi;
    graph.edges.push_back(e);
  }
  return graph;
}

}  // namespace spin7
