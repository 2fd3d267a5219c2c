#include "spin7/pde_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"
#include "spin7/errors.hpp"
#include "spin7/structure.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

std::string SolverReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["iterations"] = iterations;
  j["final_update"] = final_update;
  j["residual_norm"] = residual_norm;
  return j.dump(2);
}

namespace {

// Interior nodes of one color with their stencil weights.
struct ColorSet {
  std::vector<std::size_t> node;
  std::vector<std::array<double, 4>> w;  // c_a / h_a^2
  std::vector<double> inv_diag;          // 1 / (2 sum_a w_a)
};

double discrete_residual(const GridSpec& s, const std::vector<double>& u, std::size_t i, const std::array<double, 4>& w) {
  double r = 0.0;
  for (int a = 0; a < s.dim; ++a) {
    const std::size_t st = s.stride(a);
    r += w[a] * (u[i + st] + u[i - st] - 2 * u[i]);
  }
  return r;
}

}  // namespace

SolveResult solve_elliptic(const GridSpec& spec, std::vector<std::string> axis_names, const AxisCoefficient& coef,
                           const GridFunction& boundary, const SolverOptions& opts) {
  spec.validate();
  for (int a = 0; a < spec.dim; ++a) {
    if (spec.n[a] < 3) throw std::invalid_argument("solver needs at least 3 points per axis");
  }
  if (!(opts.omega > 0.0 && opts.omega < 2.0)) throw std::invalid_argument("SOR factor must lie in (0, 2)");

  SolveResult out;
  GridField& f = out.field;
  f.spec = spec;
  f.axis_names = std::move(axis_names);
  const std::size_t n = spec.size();
  f.values.assign(n, 0.0);
  f.boundary.assign(n, 0);

  std::array<ColorSet, 2> colors;
  double bmin = INFINITY, bmax = -INFINITY, bsum = 0.0;
  std::size_t bcount = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = spec.unflatten(i);
    const auto p = spec.point(i);
    std::array<double, 4> w{};
    for (int a = 0; a < spec.dim; ++a) {
      const double c = coef(p, a);
      if (!(c > 0.0)) {
        throw NonEllipticError("coefficient of axis " + f.axis_names.at(a) + " is not positive at a grid point");
      }
      const double h = spec.spacing(a);
      w[a] = c / (h * h);
    }
    if (spec.on_boundary(idx)) {
      f.boundary[i] = 1;
      const double b = boundary(p);
      if (!std::isfinite(b)) throw std::invalid_argument("boundary data must be finite");
      f.values[i] = b;
      bmin = std::min(bmin, b);
      bmax = std::max(bmax, b);
      bsum += b;
      ++bcount;
      continue;
    }
    int parity = 0;
    for (int a = 0; a < spec.dim; ++a) parity += idx[a];
    ColorSet& cs = colors[parity % 2];
    cs.node.push_back(i);
    cs.w.push_back(w);
    double diag = 0.0;
    for (int a = 0; a < spec.dim; ++a) diag += 2 * w[a];
    cs.inv_diag.push_back(1.0 / diag);
  }
  const double mean = bsum / static_cast<double>(bcount);
  for (const auto& cs : colors) {
    for (std::size_t i : cs.node) f.values[i] = mean;
  }
  const double range = bmax - bmin;
  const double scale = range > 0.0 ? range : std::max(1.0, std::abs(mean));
  const double stop = opts.tolerance * scale;

  std::vector<double>& u = f.values;
  SolverReport& rep = out.report;
  const double om = opts.omega;
  for (long it = 1;; ++it) {
    double worst = 0.0;
    for (const auto& cs : colors) {
      const long m = static_cast<long>(cs.node.size());
#pragma omp parallel for schedule(static) reduction(max : worst) if (opts.parallel)
      for (long k = 0; k < m; ++k) {
        const std::size_t i = cs.node[k];
        double acc = 0.0;
        for (int a = 0; a < spec.dim; ++a) {
          const std::size_t st = spec.stride(a);
          acc += cs.w[k][a] * (u[i + st] + u[i - st]);
        }
        const double delta = om * (acc * cs.inv_diag[k] - u[i]);
        u[i] += delta;
        worst = std::max(worst, std::abs(delta));
      }
    }
    if (it % opts.history_stride == 0 || it == 1) rep.update_history.push_back(worst);
    rep.iterations = it;
    rep.final_update = worst;
    if (worst < stop) break;
    if (it >= opts.max_iterations) {
      throw ConvergenceError("SOR did not converge within " + std::to_string(opts.max_iterations) + " iterations",
                             rep.update_history);
    }
  }
  for (const auto& cs : colors) {
    for (std::size_t k = 0; k < cs.node.size(); ++k) {
      rep.residual_norm = std::max(rep.residual_norm, std::abs(discrete_residual(spec, u, cs.node[k], cs.w[k])));
    }
  }
  return out;
}

SolveResult solve_r31(const GridSpec& spec, const GridFunction& boundary, const SolverOptions& opts) {
  if (spec.dim != 3) throw std::invalid_argument("r31 grid must have axes nu1, nu2, nu3");
  // Axis a is nu_{a+1}; its coefficient is the next coordinate cyclically.
  auto coef = [](const std::array<double, 4>& p, int a) { return p[(a + 1) % 3]; };
  return solve_elliptic(spec, {"nu1", "nu2", "nu3"}, coef, boundary, opts);
}

SolveResult solve_r22(const GridSpec& spec, double c, double d, const GridFunction& boundary, const SolverOptions& opts) {
  if (spec.dim != 2) throw std::invalid_argument("r22 grid must have axes nu1, nu2");
  auto coef = [c, d](const std::array<double, 4>& p, int a) { return a == 0 ? c + d * p[1] : 1.0; };
  return solve_elliptic(spec, {"nu1", "nu2"}, coef, boundary, opts);
}

GridFunction poly_on_axes(const Poly& p, std::vector<int> vars) {
  return [p, vars](const std::array<double, 4>& x) {
    std::array<double, 4> nu{};
    for (std::size_t a = 0; a < vars.size(); ++a) nu[vars[a]] = x[a];
    return p.evaluate(nu);
  };
}

double interior_error(const GridField& u, const GridFunction& exact) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (u.boundary[i]) continue;
    worst = std::max(worst, std::abs(u.values[i] - exact(u.spec.point(i))));
  }
  return worst;
}

namespace {

struct Accumulator {
  std::vector<double> max, sq;
  explicit Accumulator(std::size_t n) : max(n, 0.0), sq(n, 0.0) {}
};

// First and second centered differences of entry e at interior node i.
double d1(const GridSpec& s, const std::vector<double>& e, std::size_t i, int a) {
  const std::size_t st = s.stride(a);
  return (e[i + st] - e[i - st]) / (2 * s.spacing(a));
}

double d2(const GridSpec& s, const std::vector<double>& e, std::size_t i, int a, int b) {
  const std::size_t sa = s.stride(a), sb = s.stride(b);
  const double ha = s.spacing(a), hb = s.spacing(b);
  if (a == b) return (e[i + sa] - 2 * e[i] + e[i - sa]) / (ha * ha);
  return (e[i + sa + sb] - e[i + sa - sb] - e[i - sa + sb] + e[i - sa - sb]) / (4 * ha * hb);
}

template <typename F>
std::vector<ResidualNorm> collect(const SampledSymField& v, std::vector<std::string> names, bool parallel, F&& eval) {
  const GridSpec& s = v.spec;
  if (s.dim != 4) throw std::invalid_argument("residual grid must be four dimensional");
  const std::size_t ne = names.size();
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!s.on_boundary(s.unflatten(i))) interior.push_back(i);
  }
  std::vector<std::vector<double>> vals(interior.size());
  const long m = static_cast<long>(interior.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (long k = 0; k < m; ++k) vals[k] = eval(interior[k]);
  std::vector<ResidualNorm> out(ne);
  for (std::size_t e = 0; e < ne; ++e) out[e].name = names[e];
  for (const auto& row : vals) {
    for (std::size_t e = 0; e < ne; ++e) {
      out[e].max = std::max(out[e].max, std::abs(row[e]));
      out[e].l2 += row[e] * row[e];
    }
  }
  for (auto& r : out) r.l2 = interior.empty() ? 0.0 : std::sqrt(r.l2 / static_cast<double>(interior.size()));
  return out;
}

}  // namespace

std::vector<ResidualNorm> grid_residual(const SampledSymField& v, bool parallel) {
  std::vector<std::string> names;
  for (int j = 0; j < 4; ++j) names.push_back("divergence_" + std::to_string(j));
  for (const auto& [a, b] : upper_pairs()) names.push_back("elliptic_" + std::to_string(a) + std::to_string(b));
  const GridSpec& s = v.spec;
  return collect(v, names, parallel, [&](std::size_t i) {
    std::vector<double> row;
    for (int j = 0; j < 4; ++j) {
      double div = 0.0;
      for (int a = 0; a < 4; ++a) div += d1(s, v.entry(a, j), i, a);
      row.push_back(div);
    }
    // Q only sees first derivatives: evaluate it on the affine field with the same jet.
    std::array<Poly, 10> lin;
    int n = 0;
    for (const auto& [a, b] : upper_pairs()) {
      Poly p;
      for (int k = 0; k < 4; ++k) p += nu(k).scaled(Rational(d1(s, v.entry(a, b), i, k)));
      lin[n++] = p;
    }
    const auto q = operator_Q(SymMatrixField::from_upper(lin));
    for (const auto& [a, b] : upper_pairs()) {
      double l = 0.0;
      for (int p = 0; p < 4; ++p) {
        for (int r = 0; r < 4; ++r) l += v.entry(p, r)[i] * d2(s, v.entry(a, b), i, p, r);
      }
      row.push_back(l + q[a][b].constant_term().get_d());
    }
    return row;
  });
}

std::vector<ResidualNorm> grid_residual_diagonal(const SampledSymField& v, bool parallel) {
  std::vector<std::string> names;
  for (int i = 0; i < 4; ++i) names.push_back("divergence_" + std::to_string(i));
  for (int i = 0; i < 4; ++i) names.push_back("l_red_" + std::to_string(i));
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) names.push_back("q_red_" + std::to_string(i) + std::to_string(j));
  }
  const GridSpec& s = v.spec;
  return collect(v, names, parallel, [&](std::size_t i) {
    std::vector<double> row;
    for (int a = 0; a < 4; ++a) row.push_back(d1(s, v.entry(a, a), i, a));
    for (int a = 0; a < 4; ++a) {
      double l = 0.0;
      for (int j = 0; j < 4; ++j) l += v.entry(j, j)[i] * d2(s, v.entry(a, a), i, j, j);
      row.push_back(l);
    }
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) row.push_back(d1(s, v.entry(a, a), i, b) * d1(s, v.entry(b, b), i, a));
    }
    return row;
  });
}

const ResidualNorm& find_residual(const std::vector<ResidualNorm>& r, const std::string& name) {
  for (const auto& x : r) {
    if (x.name == name) return x;
  }
  throw std::out_of_range("no residual named " + name);
}

SampledSymField promote_r31(const GridField& v0, double nu0_lo, double nu0_hi, int n0) {
  const GridSpec& g = v0.spec;
  if (g.dim != 3) throw std::invalid_argument("r31 field must be three dimensional");
  GridSpec s;
  s.dim = 4;
  s.lo = {nu0_lo, g.lo[0], g.lo[1], g.lo[2]};
  s.hi = {nu0_hi, g.hi[0], g.hi[1], g.hi[2]};
  s.n = {n0, g.n[0], g.n[1], g.n[2]};
  s.validate();
  SampledSymField out;
  out.spec = s;
  int e = 0;
  for (const auto& [a, b] : upper_pairs()) {
    auto& dst = out.entries[e++];
    dst.assign(s.size(), 0.0);
    if (a != b) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto idx = s.unflatten(i);
      const auto p = s.point(i);
      switch (a) {
        case 0: dst[i] = v0.at({idx[1], idx[2], idx[3], 0}); break;
        case 1: dst[i] = p[2]; break;
        case 2: dst[i] = p[3]; break;
        default: dst[i] = p[1]; break;
      }
    }
  }
  return out;
}

}  // namespace spin7
