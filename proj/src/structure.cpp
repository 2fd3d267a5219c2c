#include "spin7/structure.hpp"

#include <stdexcept>

#include "spin7/errors.hpp"

namespace spin7 {

SymMatrixField::SymMatrixField(const PolyMatrix4& m) : m_(m) {
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (!(m[i][j] == m[j][i])) throw std::invalid_argument("matrix field is not symmetric");
    }
  }
}

SymMatrixField SymMatrixField::identity() { return diagonal({Poly(1L), Poly(1L), Poly(1L), Poly(1L)}); }

SymMatrixField SymMatrixField::diagonal(const std::array<Poly, 4>& d) {
  PolyMatrix4 m{};
  for (int i = 0; i < 4; ++i) m[i][i] = d[i];
  return SymMatrixField(m);
}

SymMatrixField SymMatrixField::from_upper(std::span<const Poly> entries) {
  if (entries.size() != 10) throw std::invalid_argument("symmetric field needs 10 entries");
  PolyMatrix4 m{};
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      m[i][j] = entries[n];
      m[j][i] = entries[n];
      ++n;
    }
  }
  return SymMatrixField(m);
}

bool SymMatrixField::is_diagonal() const {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j && !m_[i][j].is_zero()) return false;
    }
  }
  return true;
}

Poly SymMatrixField::det() const { return det4(m_); }
PolyMatrix4 SymMatrixField::adjugate() const { return adjugate4(m_); }

RationalMatrix4 SymMatrixField::evaluate(std::span<const Rational> point) const {
  RationalMatrix4 r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r[i][j] = m_[i][j].evaluate(point);
  }
  return r;
}

Eigen::Matrix4d SymMatrixField::evaluate(std::span<const double> point) const {
  std::vector<Rational> q(point.begin(), point.end());
  RationalMatrix4 e = evaluate(std::span<const Rational>(q));
  Eigen::Matrix4d r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r(i, j) = e[i][j].get_d();
  }
  return r;
}

namespace {

// Cofactor expansion shared by the polynomial and rational versions.
template <class T>
T minor3(const std::array<std::array<T, 4>, 4>& m, int skip_row, int skip_col) {
  int r[3], c[3];
  for (int i = 0, n = 0; i < 4; ++i) {
    if (i != skip_row) r[n++] = i;
  }
  for (int j = 0, n = 0; j < 4; ++j) {
    if (j != skip_col) c[n++] = j;
  }
  auto e = [&](int a, int b) -> const T& { return m[r[a]][c[b]]; };
  T t1 = e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1);
  T t2 = e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0);
  T t3 = e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0);
  return e(0, 0) * t1 - e(0, 1) * t2 + e(0, 2) * t3;
}

template <class T>
std::array<std::array<T, 4>, 4> adjugate_impl(const std::array<std::array<T, 4>, 4>& m) {
  std::array<std::array<T, 4>, 4> a;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      T c = minor3(m, j, i);
      a[i][j] = ((i + j) % 2 == 0) ? c : T(-c);
    }
  }
  return a;
}

template <class T>
T det_impl(const std::array<std::array<T, 4>, 4>& m) {
  T r = T(0L);
  for (int j = 0; j < 4; ++j) {
    if (m[0][j] == T(0L)) continue;
    T c = m[0][j] * minor3(m, 0, j);
    if (j % 2 == 0) {
      r = r + c;
    } else {
      r = r - c;
    }
  }
  return r;
}

}  // namespace

Poly det4(const PolyMatrix4& m) { return det_impl(m); }
PolyMatrix4 adjugate4(const PolyMatrix4& m) { return adjugate_impl(m); }
Rational det4(const RationalMatrix4& m) { return det_impl(m); }
RationalMatrix4 adjugate4(const RationalMatrix4& m) { return adjugate_impl(m); }

RationalMatrix4 inverse4(const RationalMatrix4& m) {
  Rational dt = det4(m);
  if (dt == 0) throw std::domain_error("singular matrix");
  RationalMatrix4 a = adjugate4(m);
  for (auto& row : a) {
    for (auto& x : row) x /= dt;
  }
  return a;
}

std::array<CyclicQuad, 4> cyclic_quadruples() { return {{{0, 1, 2, 3}, {1, 2, 3, 0}, {2, 3, 0, 1}, {3, 0, 1, 2}}}; }

namespace {

PolyForm e(std::initializer_list<int> gens) {
  PolyForm r = PolyForm::scalar(Poly(1L));
  for (int g : gens) r = wedge(r, PolyForm::generator(g));
  return r;
}

}  // namespace

PolyForm model_phi0_g2() {
  return e({1, 2, 3}) - e({1, 4, 5}) - e({1, 6, 7}) - e({2, 4, 6}) - e({2, 7, 5}) - e({3, 4, 7}) - e({3, 5, 6});
}

PolyForm model_phi0() {
  PolyForm phi = model_phi0_g2();
  constexpr GenMask seven = 0xfe;
  return wedge(PolyForm::generator(0), phi) + hodge_star(phi, seven);
}

PhiParts phi_parts(const SymMatrixField& v) {
  PhiParts p;
  p.det = v.det();
  PolyMatrix4 adj = v.adjugate();
  using F = PolyForm;
  for (const auto& [i, j, k, l] : cyclic_quadruples()) {
    F a = wedge(F::theta(i), wedge(F::dnu(j), wedge(F::dnu(k), F::dnu(l))));
    F b = wedge(wedge(F::theta(i), wedge(F::theta(j), F::theta(k))), F::dnu(l));
    p.a += (i % 2 == 0) ? a : -a;
    p.b += (l % 2 == 0) ? b : -b;
  }
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      p.c += wedge(F::dnu(a), F::theta(b)).scaled(adj[a][b]);
    }
  }
  return p;
}

void require_nondegenerate(const SymMatrixField& v) {
  if (v.det().is_zero()) throw DegenerateFieldError("det V vanishes identically");
}

RationalForm assemble_phi(const SymMatrixField& v) {
  require_nondegenerate(v);
  PhiParts p = phi_parts(v);
  Poly two_d = p.det.scaled(2);
  PolyForm num = p.a.scaled(two_d * p.det) + p.b.scaled(two_d) + wedge(p.c, p.c);
  return {num, two_d};
}

double RatFunc::evaluate(std::span<const double> point) const {
  std::vector<Rational> q(point.begin(), point.end());
  return evaluate(std::span<const Rational>(q)).get_d();
}

Rational RatFunc::evaluate(std::span<const Rational> point) const {
  Rational dv = den.evaluate(point);
  if (dv == 0) throw std::domain_error("denominator vanishes");
  return num.evaluate(point) / dv;
}

Eigen::Matrix<double, 8, 8> MetricField::evaluate(std::span<const double> point) const {
  Eigen::Matrix<double, 8, 8> r;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) r(i, j) = g[i][j].num.is_zero() ? 0.0 : g[i][j].evaluate(point);
  }
  return r;
}

MetricField assemble_metric(const SymMatrixField& v) {
  require_nondegenerate(v);
  Poly dt = v.det();
  PolyMatrix4 adj = v.adjugate();
  MetricField m;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      m.g[dnu_gen(a)][dnu_gen(b)] = {adj[a][b], Poly(1L)};
      m.g[theta_gen(a)][theta_gen(b)] = {adj[a][b], dt};
    }
  }
  return m;
}

}  // namespace spin7
