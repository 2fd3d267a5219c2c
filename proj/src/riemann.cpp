#include "spin7/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"
#include "spin7/errors.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

PolyJet::PolyJet(const Poly& q) : p(q) {
  for (int i = 0; i < 4; ++i) d[i] = p.derivative(i);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) dd[i][j] = dd[j][i] = d[i].derivative(j);
  }
}

Jet2 PolyJet::at(std::span<const double> point) const {
  Jet2 j;
  j.v = p.evaluate(point);
  for (int a = 0; a < 4; ++a) j.d[a] = d[a].evaluate(point);
  for (int a = 0; a < 4; ++a) {
    for (int b = a; b < 4; ++b) j.dd[a][b] = j.dd[b][a] = dd[a][b].evaluate(point);
  }
  return j;
}

Jet2 quotient(const Jet2& n, const Jet2& d) {
  // From n = f d: n_i = f_i d + f d_i and n_ij = f_ij d + f_i d_j + f_j d_i + f d_ij.
  Jet2 f;
  f.v = n.v / d.v;
  for (int i = 0; i < 4; ++i) f.d[i] = (n.d[i] - f.v * d.d[i]) / d.v;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      f.dd[i][j] = (n.dd[i][j] - f.d[i] * d.d[j] - f.d[j] * d.d[i] - f.v * d.dd[i][j]) / d.v;
    }
  }
  return f;
}

std::array<PolyForm, 4> gauge_potential(const std::array<PolyForm, 4>& omega) {
  DerivativeRules base;
  std::array<PolyForm, 4> out;
  for (int l = 0; l < 4; ++l) {
    const PolyForm& w = omega[l];
    if (w.is_zero()) continue;
    if (w.degree() != 2) throw std::invalid_argument("curvature forms must be 2-forms");
    for (const auto& [m, c] : w.terms()) {
      if (m & 0xf0) throw std::invalid_argument("curvature forms must only involve dnu");
    }
    if (!d(w, base).is_zero()) throw std::invalid_argument("curvature form is not closed");
    PolyForm a;
    for (const auto& [m, c] : w.terms()) {
      int i = -1, j = -1;
      for (int g = 0; g < 4; ++g) {
        if (!(m & (1u << g))) continue;
        (i < 0 ? i : j) = g;
      }
      // Homotopy from the origin: a monomial of degree k picks up 1 / (k + 2).
      Poly scaled;
      for (const auto& [key, q] : c.terms()) scaled += Poly::monomial(key, q / Rational(key_degree(key) + 2));
      a.add_term(static_cast<GenMask>(1u << j), nu(i) * scaled);
      a.add_term(static_cast<GenMask>(1u << i), -(nu(j) * scaled));
    }
    out[l] = a;
  }
  return out;
}

MetricChart MetricChart::from_field(const SymMatrixField& v) {
  require_nondegenerate(v);
  MetricChart c;
  c.v = v;
  c.omega = curvature_matrices(v).omegas();
  c.potential = gauge_potential(c.omega);
  c.phi = assemble_phi(v);
  const Poly det = v.det();
  const PolyMatrix4 adj = v.adjugate();
  Poly a[4][4];
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) a[l][i] = c.potential[l].coefficient(static_cast<GenMask>(1u << i));
  }
  c.den = PolyJet(det);
  for (int l = 0; l < 4; ++l) {
    for (int m = l; m < 4; ++m) c.num[l][m] = c.num[m][l] = PolyJet(adj[l][m]);
    for (int i = 0; i < 4; ++i) {
      Poly s;
      for (int m = 0; m < 4; ++m) s += adj[l][m] * a[m][i];
      c.num[l][4 + i] = c.num[4 + i][l] = PolyJet(s);
    }
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      Poly s = det * adj[i][j];
      for (int l = 0; l < 4; ++l) {
        for (int m = 0; m < 4; ++m) s += a[l][i] * adj[l][m] * a[m][j];
      }
      c.num[4 + i][4 + j] = c.num[4 + j][4 + i] = PolyJet(s);
    }
  }
  return c;
}

Mat8 MetricChart::metric(std::span<const double> nu) const {
  const double dv = den.p.evaluate(nu);
  Mat8 g;
  for (int a = 0; a < 8; ++a) {
    for (int b = a; b < 8; ++b) g(a, b) = g(b, a) = num[a][b].p.evaluate(nu) / dv;
  }
  return g;
}

Eigen::Matrix4d MetricChart::potential_at(std::span<const double> nu) const {
  Eigen::Matrix4d a;
  for (int l = 0; l < 4; ++l) {
    for (int i = 0; i < 4; ++i) a(l, i) = potential[l].coefficient(static_cast<GenMask>(1u << i)).evaluate(nu);
  }
  return a;
}

double Tensor4::norm() const {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

Tensor4 Tensor4::transformed(const Mat8& e) const {
  // One slot at a time: 4 * 8^5 operations.
  Tensor4 cur = *this;
  for (int slot = 0; slot < 4; ++slot) {
    Tensor4 next;
    for (int i0 = 0; i0 < 8; ++i0) {
      for (int i1 = 0; i1 < 8; ++i1) {
        for (int i2 = 0; i2 < 8; ++i2) {
          for (int i3 = 0; i3 < 8; ++i3) {
            int idx[4] = {i0, i1, i2, i3};
            double s = 0.0;
            const int keep = idx[slot];
            for (int p = 0; p < 8; ++p) {
              idx[slot] = p;
              s += cur(idx[0], idx[1], idx[2], idx[3]) * e(p, keep);
            }
            next(i0, i1, i2, i3) = s;
          }
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

namespace {

struct MetricJet {
  Mat8 g;
  std::array<Mat8, 4> dg;                 // d/dnu_i
  std::array<std::array<Mat8, 4>, 4> ddg;  // d^2/dnu_i dnu_j
};

MetricJet exact_jet(const MetricChart& c, std::span<const double> p) {
  MetricJet j;
  const Jet2 dj = c.den.at(p);
  if (dj.v == 0.0) throw DegenerateFieldError("det V vanishes at the sample point");
  for (int a = 0; a < 8; ++a) {
    for (int b = a; b < 8; ++b) {
      Jet2 q = quotient(c.num[a][b].at(p), dj);
      j.g(a, b) = j.g(b, a) = q.v;
      for (int i = 0; i < 4; ++i) {
        j.dg[i](a, b) = j.dg[i](b, a) = q.d[i];
        for (int k = 0; k < 4; ++k) j.ddg[i][k](a, b) = j.ddg[i][k](b, a) = q.dd[i][k];
      }
    }
  }
  return j;
}

MetricJet fd_jet(const MetricChart& c, std::span<const double> p, double h) {
  auto at = [&](int i, double si, int k, double sk) {
    std::array<double, 4> q{p[0], p[1], p[2], p[3]};
    if (i >= 0) q[i] += si * h;
    if (k >= 0) q[k] += sk * h;
    return c.metric(q);
  };
  MetricJet j;
  j.g = at(-1, 0, -1, 0);
  for (int i = 0; i < 4; ++i) {
    Mat8 plus = at(i, 1, -1, 0), minus = at(i, -1, -1, 0);
    j.dg[i] = (plus - minus) / (2 * h);
    j.ddg[i][i] = (plus - 2 * j.g + minus) / (h * h);
    for (int k = i + 1; k < 4; ++k) {
      j.ddg[i][k] = (at(i, 1, k, 1) - at(i, 1, k, -1) - at(i, -1, k, 1) + at(i, -1, k, -1)) / (4 * h * h);
      j.ddg[k][i] = j.ddg[i][k];
    }
  }
  return j;
}

MetricJet metric_jet(const MetricChart& c, std::span<const double> p, const CurvatureOptions& o) {
  return o.method == Differentiation::exact ? exact_jet(c, p) : fd_jet(c, p, o.h);
}

void check_metric(const Mat8& g, double max_condition) {
  Eigen::SelfAdjointEigenSolver<Mat8> es(g, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (!(ev(0) > 0.0)) throw DegenerateFieldError("metric is not positive definite at the sample point");
  const double cond = ev(7) / ev(0);
  if (cond > max_condition) {
    throw IllConditionedError("metric condition number " + std::to_string(cond) + " exceeds " +
                              std::to_string(max_condition));
  }
}

// Derivatives along coordinate x (t coordinates contribute nothing).
double dg_at(const MetricJet& j, int x, int a, int b) { return x < 4 ? 0.0 : j.dg[x - 4](a, b); }
double ddg_at(const MetricJet& j, int x, int y, int a, int b) {
  return (x < 4 || y < 4) ? 0.0 : j.ddg[x - 4][y - 4](a, b);
}

std::array<Mat8, 8> christoffel_from(const MetricJet& j) {
  std::array<Mat8, 8> gam;
  for (int c = 0; c < 8; ++c) {
    for (int a = 0; a < 8; ++a) {
      for (int b = 0; b < 8; ++b) gam[c](a, b) = 0.5 * (dg_at(j, a, c, b) + dg_at(j, b, c, a) - dg_at(j, c, a, b));
    }
  }
  return gam;
}

Tensor4 riemann_from(const MetricJet& j) {
  const auto low = christoffel_from(j);
  const Mat8 ginv = j.g.inverse();
  std::array<Mat8, 8> up;  // up[f](a, b) = Gamma^f_ab
  for (int f = 0; f < 8; ++f) {
    up[f].setZero();
    for (int c = 0; c < 8; ++c) up[f] += ginv(f, c) * low[c];
  }
  Tensor4 r;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        for (int d = 0; d < 8; ++d) {
          double s = 0.5 * (ddg_at(j, b, c, a, d) + ddg_at(j, a, d, b, c) - ddg_at(j, a, c, b, d) - ddg_at(j, b, d, a, c));
          for (int f = 0; f < 8; ++f) s += low[f](b, c) * up[f](a, d) - low[f](b, d) * up[f](a, c);
          r(a, b, c, d) = s;
        }
      }
    }
  }
  return r;
}

Mat8 gram_schmidt(const Mat8& g) {
  Mat8 e = Mat8::Zero();
  for (int k = 0; k < 8; ++k) {
    Eigen::Matrix<double, 8, 1> v = Eigen::Matrix<double, 8, 1>::Unit(k);
    for (int i = 0; i < k; ++i) v -= (e.col(i).transpose() * g * v)(0) * e.col(i);
    v /= std::sqrt((v.transpose() * g * v)(0));
    e.col(k) = v;
  }
  return e;
}

// Rows: generator components (dnu_0..3, theta_0..3) of a coordinate vector.
Mat8 generator_map(const Eigen::Matrix4d& a) {
  Mat8 t = Mat8::Zero();
  for (int i = 0; i < 4; ++i) t(i, 4 + i) = 1.0;
  for (int l = 0; l < 4; ++l) {
    t(4 + l, l) = 1.0;
    for (int i = 0; i < 4; ++i) t(4 + l, 4 + i) = a(l, i);
  }
  return t;
}

double det4(const Mat8& m, const std::array<int, 4>& rows, const std::array<int, 4>& cols) {
  Eigen::Matrix4d s;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) s(i, j) = m(rows[i], cols[j]);
  }
  return s.determinant();
}

void fill_antisymmetric(Tensor4& t, std::array<int, 4> idx, double v) {
  std::array<int, 4> perm{0, 1, 2, 3};
  do {
    int inv = 0;
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) inv += perm[i] > perm[j];
    }
    t(idx[perm[0]], idx[perm[1]], idx[perm[2]], idx[perm[3]]) = (inv % 2) ? -v : v;
  } while (std::next_permutation(perm.begin(), perm.end()));
}

Tensor4 phi_in_frame(const NumericForm& phi, const Mat8& gen_frame) {
  Tensor4 t;
  for (int a = 0; a < 8; ++a) {
    for (int b = a + 1; b < 8; ++b) {
      for (int c = b + 1; c < 8; ++c) {
        for (int d = c + 1; d < 8; ++d) {
          double s = 0.0;
          for (const auto& [m, coef] : phi) {
            std::array<int, 4> rows{};
            int n = 0;
            for (int g = 0; g < 8; ++g) {
              if (m & (1u << g)) rows[n++] = g;
            }
            s += coef * det4(gen_frame, rows, {a, b, c, d});
          }
          fill_antisymmetric(t, {a, b, c, d}, s);
        }
      }
    }
  }
  return t;
}

double ordered_norm(const Tensor4& t) {
  double s = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int b = a + 1; b < 8; ++b) {
      for (int c = b + 1; c < 8; ++c) {
        for (int d = c + 1; d < 8; ++d) s += t(a, b, c, d) * t(a, b, c, d);
      }
    }
  }
  return std::sqrt(s);
}

CurvatureSample finish_sample(const MetricChart& chart, std::span<const double> p, const Mat8& g, const Tensor4& rc) {
  CurvatureSample s;
  std::copy(p.begin(), p.begin() + 4, s.point.begin());
  s.frame = gram_schmidt(g);
  s.r = rc.transformed(s.frame);
  const Mat8 ginv = g.inverse();
  Mat8 ric = Mat8::Zero();
  for (int b = 0; b < 8; ++b) {
    for (int d = 0; d < 8; ++d) {
      for (int a = 0; a < 8; ++a) {
        for (int c = 0; c < 8; ++c) ric(b, d) += ginv(a, c) * rc(a, b, c, d);
      }
    }
  }
  s.ricci = s.frame.transpose() * ric * s.frame;
  int n = 0;
  for (int c = 0; c < 8; ++c) {
    for (int d = c + 1; d < 8; ++d) {
      Mat8& m = s.endo[n++];
      for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) m(a, b) = s.r(a, b, c, d);
      }
    }
  }
  const Eigen::Matrix4d pot = chart.potential_at(p);
  const Mat8 t = generator_map(pot);
  s.phi = phi_in_frame(chart.phi.evaluate(p), t * s.frame);

  // Adapted coframe: A^{-1} theta and sqrt(det V) A^{-1} dnu with A^2 = V.
  const Eigen::Matrix4d v = chart.v.evaluate(p);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(v);
  const Eigen::Matrix4d ainv = es.operatorInverseSqrt();
  Mat8 k;
  k.topRows<4>() = ainv * t.bottomRows<4>();
  k.bottomRows<4>() = std::sqrt(v.determinant()) * ainv * t.topRows<4>();
  s.to_adapted = s.frame.inverse() * k.inverse();
  return s;
}

}  // namespace

double CurvatureSample::ricci_relative() const {
  const double m = ricci.cwiseAbs().maxCoeff();
  const double n = r.norm();
  return n > 0.0 ? m / n : m;
}

double CurvatureSample::pair_symmetry_defect() const {
  double worst = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        for (int d = 0; d < 8; ++d) worst = std::max(worst, std::abs(r(a, b, c, d) - r(c, d, a, b)));
      }
    }
  }
  return worst;
}

double CurvatureSample::bianchi_defect() const {
  double worst = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        for (int d = 0; d < 8; ++d) worst = std::max(worst, std::abs(r(a, b, c, d) + r(a, c, d, b) + r(a, d, b, c)));
      }
    }
  }
  return worst;
}

std::array<Mat8, 8> christoffel(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts) {
  return christoffel_from(metric_jet(chart, p, opts));
}

Tensor4 riemann_coordinates(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts) {
  return riemann_from(metric_jet(chart, p, opts));
}

CurvatureSample curvature_at(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts) {
  const Mat8 g = chart.metric(p);
  check_metric(g, opts.max_condition);
  return finish_sample(chart, p, g, riemann_coordinates(chart, p, opts));
}

CurvatureSample curvature_richardson(const MetricChart& chart, std::span<const double> p, double h) {
  const Mat8 g = chart.metric(p);
  check_metric(g, CurvatureOptions{}.max_condition);
  CurvatureOptions o{Differentiation::finite_difference, h};
  Tensor4 coarse = riemann_coordinates(chart, p, o);
  o.h = h / 2;
  Tensor4 fine = riemann_coordinates(chart, p, o);
  Tensor4 r;
  for (std::size_t i = 0; i < r.x.size(); ++i) r.x[i] = (4 * fine.x[i] - coarse.x[i]) / 3;
  return finish_sample(chart, p, g, r);
}

std::vector<CurvatureSample> curvature_samples(const MetricChart& chart, const std::vector<std::array<double, 4>>& points,
                                               const CurvatureOptions& opts, bool parallel) {
  std::vector<CurvatureSample> out(points.size());
  std::vector<std::string> errors(points.size());
  const long n = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < n; ++i) {
    try {
      out[i] = curvature_at(chart, points[i], opts);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (long i = 0; i < n; ++i) {
    if (!errors[i].empty()) curvature_at(chart, points[i], opts);  // rethrow with the original type
  }
  return out;
}

Tensor4 derivation_action(const Mat8& s, const Tensor4& phi) {
  Tensor4 out;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      for (int c = 0; c < 8; ++c) {
        for (int d = 0; d < 8; ++d) {
          double v = 0.0;
          for (int e = 0; e < 8; ++e) {
            v += s(e, a) * phi(e, b, c, d) + s(e, b) * phi(a, e, c, d) + s(e, c) * phi(a, b, e, d) +
                 s(e, d) * phi(a, b, c, e);
          }
          out(a, b, c, d) = v;
        }
      }
    }
  }
  return out;
}

Membership spin7_membership(const Mat8& s, const Tensor4& phi, double tol) {
  Membership m;
  const double n = s.norm();
  m.defect = n > 0.0 ? ordered_norm(derivation_action(s, phi)) / n : 0.0;
  m.member = m.defect < tol;
  return m;
}

HolonomySpan holonomy_span(const std::vector<CurvatureSample>& samples, double rel_threshold) {
  HolonomySpan out;
  const int cols = static_cast<int>(samples.size()) * 28;
  Eigen::MatrixXd stack(28, std::max(cols, 1));
  stack.setZero();
  int col = 0;
  for (const auto& s : samples) {
    double biggest = 0.0;
    for (const auto& m : s.endo) biggest = std::max(biggest, m.norm());
    for (const auto& m : s.endo) {
      const Mat8 ad = s.to_adapted.transpose() * m * s.to_adapted;
      int row = 0;
      for (int a = 0; a < 8; ++a) {
        for (int b = a + 1; b < 8; ++b) stack(row++, col) = ad(a, b);
      }
      ++col;
      const double def = biggest > 0.0 ? ordered_norm(derivation_action(m, s.phi)) / biggest : 0.0;
      out.membership_defects.push_back(def);
      out.max_defect = std::max(out.max_defect, def);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
  const auto& sv = svd.singularValues();
  out.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = sv.size() ? sv(0) : 0.0;
  for (int i = 0; i < sv.size(); ++i) {
    if (top > 0.0 && sv(i) > rel_threshold * top) ++out.dimension;
  }
  const int r = out.dimension;
  if (r == 0 || r >= sv.size() || sv(r) == 0.0) {
    out.min_gap = std::numeric_limits<double>::infinity();
  } else {
    out.min_gap = sv(r - 1) / sv(r);
  }
  return out;
}

std::string holonomy_report_json(const std::string& family, const std::vector<CurvatureSample>& samples, double h,
                                 const HolonomySpan& span) {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["family"] = family;
  auto pts = nlohmann::ordered_json::array();
  double ricci = 0.0;
  for (const auto& s : samples) {
    pts.push_back(s.point);
    ricci = std::max(ricci, s.ricci_relative());
  }
  j["points"] = pts;
  j["h"] = h;
  j["ricci_rel_norm"] = ricci;
  j["span_dim"] = span.dimension;
  if (std::isfinite(span.min_gap)) {
    j["min_gap"] = span.min_gap;
  } else {
    j["min_gap"] = nullptr;
  }
  j["membership_max_defect"] = span.max_defect;
  return j.dump(2);
}

}  // namespace spin7
