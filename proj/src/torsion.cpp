#include "spin7/torsion.hpp"

#include "json.hpp"

#include <stdexcept>

#include "spin7/errors.hpp"

namespace spin7 {

std::array<Poly, 4> divergence_residual(const SymMatrixField& v) {
  std::array<Poly, 4> r;
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 4; ++i) r[j] += v(i, j).derivative(i);
  }
  return r;
}

bool is_divergence_free(const SymMatrixField& v) {
  for (const auto& r : divergence_residual(v)) {
    if (!r.is_zero()) return false;
  }
  return true;
}

PolyForm CurvatureSet::omega(int l) const {
  PolyForm w = PolyForm::basis(0b11, Poly());
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) w.add_term(static_cast<GenMask>((1u << i) | (1u << j)), z[l][i][j]);
  }
  return w;
}

std::array<PolyForm, 4> CurvatureSet::omegas() const { return {omega(0), omega(1), omega(2), omega(3)}; }

namespace {

// For each l the triple (ijk) is used together with its two cyclic rotations.
constexpr int kIndexTable[4][3] = {{1, 2, 3}, {3, 2, 0}, {0, 1, 3}, {0, 2, 1}};

}  // namespace

CurvatureSet curvature_matrices(const SymMatrixField& v) {
  auto dv = [&](int a, int b, int p) { return v(a, b).derivative(p); };
  CurvatureSet cs;
  for (int l = 0; l < 4; ++l) {
    const int* t = kIndexTable[l];
    for (int rot = 0; rot < 3; ++rot) {
      int i = t[rot], j = t[(rot + 1) % 3], k = t[(rot + 2) % 3];
      Poly lead;
      for (int p = 0; p < 4; ++p) lead += v(p, j) * dv(l, k, p) - v(p, k) * dv(l, j, p);
      cs.z[l][l][i] = lead;
      cs.z[l][i][l] = -lead;

      Poly trans = v(l, k) * (dv(l, i, i) + dv(l, j, j) + dv(l, k, k));
      for (int p = 0; p < 4; ++p) trans += v(l, p) * dv(l, k, p);
      trans -= v(i, k) * dv(l, l, i) + v(j, k) * dv(l, l, j) + v(k, k) * dv(l, l, k);
      cs.z[l][i][j] = trans;
      cs.z[l][j][i] = -trans;
    }
  }
  return cs;
}

namespace {

RationalForm dphi_from_parts(const PhiParts& p, const DerivativeRules& rules) {
  PolyForm c2 = wedge(p.c, p.c);
  PolyForm dd = d(PolyForm::scalar(p.det), rules);
  PolyForm inner = d(p.a.scaled(p.det), rules) + d(p.b, rules);
  Poly d2 = p.det * p.det;
  PolyForm num = inner.scaled(d2.scaled(2)) + d(c2, rules).scaled(p.det) - wedge(dd, c2);
  return {num, d2.scaled(2)};
}

CurvatureSet constant_curvature(const std::array<RationalMatrix4, 4>& z) {
  CurvatureSet cs;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) cs.z[l][i][j] = Poly(z[l][i][j]);
    }
  }
  return cs;
}

ExactForm constant_terms(const PolyForm& f) {
  ExactForm r;
  for (const auto& [m, c] : f.terms()) {
    Rational v = c.constant_term();
    if (v != 0) r.emplace(m, v);
  }
  return r;
}

}  // namespace

RationalForm oracle_dphi(const SymMatrixField& v, const CurvatureSet& z) {
  require_nondegenerate(v);
  return dphi_from_parts(phi_parts(v), z.rules());
}

SymMatrixField linear_jet(const SymMatrixField& v, std::span<const Rational> p) {
  PolyMatrix4 m{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Poly e(v(a, b).evaluate(p));
      for (int q = 0; q < 4; ++q) e += nu(q).scaled(v(a, b).derivative(q).evaluate(p));
      m[a][b] = e;
    }
  }
  return SymMatrixField(m);
}

std::array<RationalMatrix4, 4> evaluate_curvature(const CurvatureSet& z, std::span<const Rational> p) {
  std::array<RationalMatrix4, 4> r;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) r[l][i][j] = z.z[l][i][j].evaluate(p);
    }
  }
  return r;
}

ExactForm dphi_at(const SymMatrixField& v, std::span<const Rational> p, const std::array<RationalMatrix4, 4>& z) {
  SymMatrixField jet = linear_jet(v, p);
  PhiParts parts = phi_parts(jet);
  Rational d0 = parts.det.constant_term();
  if (d0 == 0) throw DegenerateFieldError("det V vanishes at the evaluation point");
  RationalForm df = dphi_from_parts(parts, constant_curvature(z).rules());
  Rational den = df.den.constant_term();
  ExactForm r;
  for (auto& [m, c] : constant_terms(df.num)) r.emplace(m, c / den);
  return r;
}

std::optional<std::array<RationalMatrix4, 4>> solve_curvature_at(const SymMatrixField& v, std::span<const Rational> p) {
  SymMatrixField jet = linear_jet(v, p);
  PhiParts parts = phi_parts(jet);
  if (parts.det.constant_term() == 0) throw DegenerateFieldError("det V vanishes at the evaluation point");
  PolyForm num = parts.a.scaled(parts.det.scaled(2) * parts.det) + parts.b.scaled(parts.det.scaled(2)) +
                 wedge(parts.c, parts.c);
  Poly den = parts.det.scaled(2);
  DerivativeRules closed = ansatz_rules({});
  Rational den0 = den.constant_term();
  // Affine part: den * d_closed(num) - d(den) ^ num.
  ExactForm affine = constant_terms(d(num, closed).scaled(den) - wedge(d(PolyForm::scalar(den), closed), num));

  struct Unknown {
    int l, i, j;
  };
  std::vector<Unknown> unknowns;
  std::vector<ExactForm> columns;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        DerivativeRules unit;
        unit.nvars = 0;
        unit.dgen[theta_gen(l)] = PolyForm::basis(static_cast<GenMask>((1u << i) | (1u << j)));
        unknowns.push_back({l, i, j});
        columns.push_back(constant_terms(d(num, unit)));
      }
    }
  }
  std::map<GenMask, std::size_t> row_of;
  for (const auto& [m, c] : affine) row_of.emplace(m, 0);
  for (const auto& col : columns) {
    for (const auto& [m, c] : col) row_of.emplace(m, 0);
  }
  std::size_t n = 0;
  for (auto& [m, idx] : row_of) idx = n++;
  QMatrix mat(n, QVector(unknowns.size(), 0));
  QVector rhs(n, 0);
  for (const auto& [m, c] : affine) rhs[row_of[m]] = -c;
  for (std::size_t u = 0; u < columns.size(); ++u) {
    for (const auto& [m, c] : columns[u]) mat[row_of[m]][u] = den0 * c;
  }
  auto sol = solve(mat, rhs);
  if (!sol) return std::nullopt;
  if (!sol->unique()) throw std::runtime_error("closedness system does not determine the curvature");
  std::array<RationalMatrix4, 4> z{};
  for (auto& zl : z) {
    for (auto& row : zl) row.fill(0);
  }
  for (std::size_t u = 0; u < unknowns.size(); ++u) {
    const auto& [l, i, j] = unknowns[u];
    z[l][i][j] = sol->x[u];
    z[l][j][i] = -sol->x[u];
  }
  return z;
}

DivergenceFactorization divergence_factorization(const SymMatrixField& v, std::span<const Rational> p) {
  RationalMatrix4 vp = v.evaluate(p);
  std::vector<Rational> origin(4, 0);
  struct Slot {
    int a, b, q;
  };
  std::vector<Slot> slots;
  std::vector<ExactForm> columns;
  for (const auto& [a, b] : upper_pairs()) {
    for (int q = 0; q < 4; ++q) {
      PolyMatrix4 m{};
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) m[i][j] = Poly(vp[i][j]);
      }
      m[a][b] += nu(q);
      if (a != b) m[b][a] += nu(q);
      SymMatrixField unit(m);
      auto z = evaluate_curvature(curvature_matrices(unit), origin);
      slots.push_back({a, b, q});
      columns.push_back(dphi_at(unit, origin, z));
    }
  }
  // dPhi(p) is linear in the jet; the value at the zero jet must vanish.
  PolyMatrix4 m0{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m0[i][j] = Poly(vp[i][j]);
  }
  ExactForm at_zero = dphi_at(SymMatrixField(m0), origin, {});
  if (!at_zero.empty()) throw std::logic_error("dPhi is not linear in the first jet");

  DivergenceFactorization out;
  std::map<GenMask, std::size_t> row_of;
  for (const auto& col : columns) {
    for (const auto& [mask, c] : col) row_of.emplace(mask, 0);
  }
  for (auto& [mask, idx] : row_of) {
    idx = out.masks.size();
    out.masks.push_back(mask);
  }
  // Divergence map: r_j = sum_i d_i V_ij.
  QMatrix dv(4, QVector(slots.size(), 0));
  for (std::size_t s = 0; s < slots.size(); ++s) {
    const auto& [a, b, q] = slots[s];
    if (q == a) dv[b][s] += 1;
    if (a != b && q == b) dv[a][s] += 1;
  }
  QMatrix dvt = transpose(dv);
  out.spanned = true;
  out.factor.assign(out.masks.size(), QVector(4, 0));
  for (std::size_t r = 0; r < out.masks.size(); ++r) {
    QVector row(slots.size(), 0);
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto it = columns[s].find(out.masks[r]);
      if (it != columns[s].end()) row[s] = it->second;
    }
    auto f = solve(dvt, row);
    if (!f) {
      out.spanned = false;
      continue;
    }
    out.factor[r] = f->x;
  }
  auto res = divergence_residual(v);
  for (const auto& r : res) out.residual.push_back(r.evaluate(p));
  out.dphi = dphi_at(v, p, evaluate_curvature(curvature_matrices(v), p));
  return out;
}

std::array<std::pair<int, int>, 10> upper_pairs() {
  std::array<std::pair<int, int>, 10> r;
  int n = 0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) r[n++] = {a, b};
  }
  return r;
}

SymPolyMatrix operator_L(const SymMatrixField& v) {
  SymPolyMatrix r{};
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) {
      Poly s;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          if (!v(i, j).is_zero()) s += v(i, j) * v(a, b).derivative(i).derivative(j);
        }
      }
      r[a][b] = s;
      r[b][a] = s;
    }
  }
  return r;
}

SymPolyMatrix operator_Q(const SymMatrixField& v) {
  // dv(a, b, k) is the derivative of V_ab along nu_k.
  std::array<std::array<std::array<Poly, 4>, 4>, 4> dd;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      for (int k = 0; k < 4; ++k) dd[a][b][k] = v(a, b).derivative(k);
    }
  }
  auto dv = [&](int a, int b, int k) -> const Poly& { return dd[a][b][k]; };
  SymPolyMatrix q{};
  for (const auto& [i, j, k, l] : cyclic_quadruples()) {
    Poly s = dv(i, j, i) * dv(i, i, j) + dv(i, j, j) * dv(i, j, j) + dv(i, k, i) * dv(i, i, k) +
             dv(i, j, k) * dv(k, i, j) + dv(i, j, j) * dv(k, i, k) + dv(i, k, k) * dv(i, k, k) +
             dv(i, i, l) * dv(l, i, i) + dv(i, j, l) * dv(l, i, j) + dv(i, k, l) * dv(l, i, k) +
             dv(i, j, j) * dv(l, i, l) + dv(i, k, k) * dv(l, i, l) + dv(i, l, l) * dv(i, l, l);
    q[i][i] = s.scaled(-2);
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      int k = -1, l = -1;
      for (int m = 0; m < 4; ++m) {
        if (m == i || m == j) continue;
        (k < 0 ? k : l) = m;
      }
      Poly s = dv(i, j, i) * dv(j, i, j) + dv(i, j, i) * dv(i, k, k) + dv(i, j, i) * dv(i, l, l) +
               dv(i, j, j) * dv(j, k, k) + dv(i, j, j) * dv(j, l, l);
      s -= dv(i, j, k) * dv(k, i, i) + dv(i, j, l) * dv(l, i, i) + dv(i, i, j) * dv(j, j, i) +
           dv(i, k, j) * dv(j, j, k) + dv(i, l, j) * dv(j, j, l) + dv(i, i, k) * dv(j, k, i) +
           dv(i, j, k) * dv(j, k, j) + dv(i, k, k) * dv(j, k, k) + dv(i, l, k) * dv(j, k, l) +
           dv(i, i, l) * dv(j, l, i) + dv(i, j, l) * dv(j, l, j) + dv(i, k, l) * dv(j, l, k) +
           dv(i, l, l) * dv(j, l, l);
      q[i][j] = s;
      q[j][i] = s;
    }
  }
  return q;
}

SymPolyMatrix elliptic_residual(const SymMatrixField& v) {
  SymPolyMatrix l = operator_L(v), q = operator_Q(v);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) l[a][b] += q[a][b];
  }
  return l;
}

std::array<PolyForm, 4> oracle_domega(const SymMatrixField& v) {
  CurvatureSet cs = curvature_matrices(v);
  DerivativeRules base = ansatz_rules({});
  std::array<PolyForm, 4> r;
  for (int l = 0; l < 4; ++l) r[l] = d(cs.omega(l), base);
  return r;
}

namespace {

constexpr GenMask kBase3[4] = {0b0111, 0b1011, 0b1101, 0b1110};

}  // namespace

std::array<Poly, 16> domega_components(const SymMatrixField& v) {
  auto dw = oracle_domega(v);
  std::array<Poly, 16> r;
  for (int l = 0; l < 4; ++l) {
    for (int m = 0; m < 4; ++m) r[4 * l + m] = dw[l].coefficient(kBase3[m]);
  }
  return r;
}

std::optional<QMatrix> recompute_correspondence(const std::vector<SymMatrixField>& fields,
                                                const std::vector<std::vector<Rational>>& points) {
  QMatrix x;
  std::vector<QVector> y;
  for (const auto& f : fields) {
    auto e = elliptic_residual(f);
    auto w = domega_components(f);
    for (const auto& p : points) {
      QVector row;
      for (const auto& [a, b] : upper_pairs()) row.push_back(e[a][b].evaluate(p));
      x.push_back(row);
      QVector yr;
      for (const auto& c : w) yr.push_back(c.evaluate(p));
      y.push_back(yr);
    }
  }
  QMatrix c(16, QVector(10, 0));
  for (int r = 0; r < 16; ++r) {
    QVector rhs;
    for (const auto& yr : y) rhs.push_back(yr[r]);
    auto sol = solve(x, rhs);
    if (!sol || !sol->unique()) return std::nullopt;
    c[r] = sol->x;
  }
  return c;
}

const Correspondence& stored_correspondence() {
  // Rows: (l, abc) with abc in 012, 013, 023, 123. Columns: elliptic entries 00 01 02 03 11 12 13 22 23 33.
  static const Correspondence table = {{
#include "correspondence_table.inc"
  }};
  return table;
}

QMatrix correspondence_left_inverse() {
  const auto& c = stored_correspondence();
  QMatrix cm(16, QVector(10));
  for (int r = 0; r < 16; ++r) {
    for (int k = 0; k < 10; ++k) cm[r][k] = c[r][k];
  }
  QMatrix ct = transpose(cm);
  QMatrix gram = multiply(ct, cm);
  QMatrix p(10, QVector(16, 0));
  for (int col = 0; col < 16; ++col) {
    QVector rhs(10);
    for (int k = 0; k < 10; ++k) rhs[k] = ct[k][col];
    auto s = solve(gram, rhs);
    if (!s || !s->unique()) throw std::logic_error("stored correspondence is not injective");
    for (int k = 0; k < 10; ++k) p[k][col] = s->x[k];
  }
  return p;
}

std::vector<Deviation> formula_deviations(const std::vector<SymMatrixField>& fields,
                                          const std::vector<std::vector<Rational>>& points) {
  std::vector<Deviation> devs;
  const auto& c = stored_correspondence();
  for (const auto& f : fields) {
    CurvatureSet printed = curvature_matrices(f);
    bool div_free = is_divergence_free(f);
    auto e = elliptic_residual(f);
    auto w = domega_components(f);
    for (const auto& p : points) {
      auto oracle = solve_curvature_at(f, p);
      if (oracle) {
        auto zp = evaluate_curvature(printed, p);
        for (int l = 0; l < 4; ++l) {
          for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
              if (zp[l][i][j] == (*oracle)[l][i][j]) continue;
              bool lead = (i == l || j == l);
              devs.push_back({lead ? "curvature_leading" : "curvature_transverse", {l, i, j},
                              zp[l][i][j].get_str(), (*oracle)[l][i][j].get_str()});
            }
          }
        }
      }
      if (!div_free) continue;
      QVector ev;
      for (const auto& [a, b] : upper_pairs()) ev.push_back(e[a][b].evaluate(p));
      for (int r = 0; r < 16; ++r) {
        Rational pred = 0;
        for (int k = 0; k < 10; ++k) pred += c[r][k] * ev[k];
        Rational actual = w[r].evaluate(p);
        if (pred != actual) {
          devs.push_back({"elliptic_operator", {r / 4, r % 4}, pred.get_str(), actual.get_str()});
        }
      }
    }
  }
  return devs;
}

std::string deviations_json(const std::vector<Deviation>& devs) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& d : devs) {
    arr.push_back({{"formula_id", d.formula_id},
                   {"index_tuple", d.index_tuple},
                   {"printed_term", d.printed_term},
                   {"oracle_term", d.oracle_term}});
  }
  return arr.dump(2);
}

GL4Action::GL4Action(const RationalMatrix4& m) : a(m) {
  if (det4(m) == 0) throw std::invalid_argument("GL(4) element must be invertible");
}

GL4Action GL4Action::identity() { return scaling(1); }

GL4Action GL4Action::scaling(const Rational& t) {
  RationalMatrix4 m{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m[i][j] = (i == j) ? t : Rational(0);
  }
  return GL4Action(m);
}

GL4Action GL4Action::compose(const GL4Action& other) const {
  RationalMatrix4 m{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      Rational s = 0;
      for (int k = 0; k < 4; ++k) s += a[i][k] * other.a[k][j];
      m[i][j] = s;
    }
  }
  return GL4Action(m);
}

Rational GL4Action::det() const { return det4(a); }

RationalMatrix4 GL4Action::inverse_transpose() const {
  RationalMatrix4 inv = inverse4(a);
  RationalMatrix4 t;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) t[i][j] = inv[j][i];
  }
  return t;
}

RationalMatrix4 GL4Action::nu_map() const {
  RationalMatrix4 m = inverse_transpose();
  Rational dt = det();
  for (auto& row : m) {
    for (auto& x : row) x *= dt;
  }
  return m;
}

namespace {

std::vector<Poly> linear_substitution(const RationalMatrix4& m) {
  std::vector<Poly> subs(4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) subs[i] += nu(j).scaled(m[i][j]);
  }
  return subs;
}

}  // namespace

SymMatrixField gl4_transform(const SymMatrixField& v, const GL4Action& g) {
  auto subs = linear_substitution(inverse4(g.nu_map()));
  RationalMatrix4 ainv = inverse4(g.a);
  PolyMatrix4 moved{};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) moved[a][b] = v(a, b).substitute(subs);
  }
  PolyMatrix4 out{};
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      Poly s;
      for (int a = 0; a < 4; ++a) {
        if (ainv[a][i] == 0) continue;
        for (int b = 0; b < 4; ++b) {
          if (ainv[b][j] == 0 || moved[a][b].is_zero()) continue;
          s += moved[a][b].scaled(ainv[a][i] * ainv[b][j]);
        }
      }
      out[i][j] = s;
      out[j][i] = s;
    }
  }
  return SymMatrixField(out);
}

Poly pull_back_to_nu(const Poly& f, const GL4Action& g) { return f.substitute(linear_substitution(g.nu_map())); }

std::optional<int> elliptic_scaling_weight(const SymMatrixField& v, const Rational& t) {
  if (t == 0 || t == 1 || t == -1) throw std::invalid_argument("scaling parameter must not be 0 or +-1");
  GL4Action g = GL4Action::scaling(t);
  auto before = elliptic_residual(v);
  auto after = elliptic_residual(gl4_transform(v, g));
  std::optional<int> weight;
  for (const auto& [a, b] : upper_pairs()) {
    Poly pulled = pull_back_to_nu(after[a][b], g);
    if (before[a][b].is_zero()) {
      if (!pulled.is_zero()) return std::nullopt;
      continue;
    }
    Rational ratio = pulled.is_zero() ? Rational(0) : Rational(pulled.terms()[0].second / before[a][b].terms()[0].second);
    if (ratio == 0 || !(pulled == before[a][b].scaled(ratio))) return std::nullopt;
    std::optional<int> w;
    Rational power = 1;
    for (int e = 0; e <= 64 && !w; ++e, power *= t) {
      if (ratio == power) w = e;
      if (ratio == 1 / power) w = -e;
    }
    if (!w || (weight && *weight != *w)) return std::nullopt;
    weight = w;
  }
  return weight;
}

}  // namespace spin7
