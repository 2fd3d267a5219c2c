#include "spin7/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spin7/errors.hpp"
#include "spin7/torsion.hpp"

namespace spin7 {

namespace {

constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

int upper_index(int a, int b) {
  if (a > b) std::swap(a, b);
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      if (i == a && j == b) return n;
      ++n;
    }
  }
  return -1;
}

// Base indices of all lines parallel to `axis`.
std::vector<std::size_t> line_starts(const GridSpec& spec, int axis) {
  GridSpec face = spec;
  face.n[axis] = 1;
  std::vector<std::size_t> starts;
  starts.reserve(face.size());
  for (std::size_t f = 0; f < face.size(); ++f) {
    auto idx = face.unflatten(f);
    idx[axis] = 0;
    starts.push_back(spec.flatten(idx));
  }
  return starts;
}

// Antisymmetric 4x4 field with only the (0, b) entries nonzero.
struct FirstRowSkew {
  std::array<std::vector<double>, 4> m0;  // m0[b] = M_{0b}, m0[0] unused

  double get(int k, int b, std::size_t i) const {
    if (k == b) return 0.0;
    if (k == 0) return m0[b][i];
    if (b == 0) return -m0[k][i];
    return 0.0;
  }
};

// For divergence-free X returns skew M with sum_k d_k M_kb = X_b.
FirstRowSkew skew_antiderivative(const GridSpec& spec, const std::array<std::vector<double>, 4>& x, bool parallel) {
  FirstRowSkew m;
  for (int b = 1; b < 4; ++b) m.m0[b] = cumulative_integral(spec, x[b], 0, parallel);
  std::vector<double> face(spec.size());
  const std::size_t s0 = spec.stride(0);
  for (std::size_t i = 0; i < spec.size(); ++i) face[i] = x[0][i % s0];
  std::vector<double> g = cumulative_integral(spec, face, 1, parallel);
  for (std::size_t i = 0; i < spec.size(); ++i) m.m0[1][i] -= g[i];
  return m;
}

}  // namespace

int pair_index(int i, int j) {
  if (i == j) throw std::invalid_argument("pair indices must differ");
  if (i > j) std::swap(i, j);
  for (int p = 0; p < 6; ++p) {
    if (kPairs[p][0] == i && kPairs[p][1] == j) return p;
  }
  return -1;
}

int pair_sign(int i, int j) { return i < j ? 1 : -1; }

SampledSymField SampledSymField::sample(const SymMatrixField& v, const GridSpec& spec) {
  if (spec.dim != 4) throw std::invalid_argument("potential grid must be four dimensional");
  spec.validate();
  SampledSymField s;
  s.spec = spec;
  int n = 0;
  for (const auto& [a, b] : upper_pairs()) {
    const Poly& p = v(a, b);
    auto& out = s.entries[n++];
    out.resize(spec.size());
    for (std::size_t i = 0; i < spec.size(); ++i) {
      auto pt = spec.point(i);
      out[i] = p.evaluate(std::span<const double>(pt.data(), 4));
    }
  }
  return s;
}

const std::vector<double>& SampledSymField::entry(int a, int b) const { return entries[upper_index(a, b)]; }

std::vector<double> cumulative_integral(const GridSpec& spec, const std::vector<double>& f, int axis, bool parallel) {
  const int n = spec.n[axis];
  if (n < 4) throw std::invalid_argument("cumulative integration needs at least 4 points per axis");
  const double h = spec.spacing(axis);
  const std::size_t st = spec.stride(axis);
  const auto starts = line_starts(spec, axis);
  std::vector<double> out(f.size(), 0.0);
  const long nlines = static_cast<long>(starts.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (long li = 0; li < nlines; ++li) {
    const std::size_t base = starts[li];
    auto v = [&](int i) { return f[base + i * st]; };
    double acc = 0.0;
    out[base] = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      double piece;
      if (i == 0) {
        piece = 9 * v(0) + 19 * v(1) - 5 * v(2) + v(3);
      } else if (i == n - 2) {
        piece = 9 * v(n - 1) + 19 * v(n - 2) - 5 * v(n - 3) + v(n - 4);
      } else {
        piece = -v(i - 1) + 13 * v(i) + 13 * v(i + 1) - v(i + 2);
      }
      acc += h * piece / 24.0;
      out[base + (i + 1) * st] = acc;
    }
  }
  return out;
}

double discrete_divergence(const SampledSymField& v) {
  const GridSpec& s = v.spec;
  double worst = 0.0;
  const long total = static_cast<long>(s.size());
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long fi = 0; fi < total; ++fi) {
    auto idx = s.unflatten(static_cast<std::size_t>(fi));
    for (int b = 0; b < 4; ++b) {
      double div = 0.0;
      for (int a = 0; a < 4; ++a) {
        const auto& e = v.entry(a, b);
        const std::size_t st = s.stride(a);
        const double h = s.spacing(a);
        const std::size_t i = static_cast<std::size_t>(fi);
        if (idx[a] == 0) {
          div += (-3 * e[i] + 4 * e[i + st] - e[i + 2 * st]) / (2 * h);
        } else if (idx[a] == s.n[a] - 1) {
          div += (3 * e[i] - 4 * e[i - st] + e[i - 2 * st]) / (2 * h);
        } else {
          div += (e[i + st] - e[i - st]) / (2 * h);
        }
      }
      worst = std::max(worst, std::abs(div));
    }
  }
  return worst;
}

double PotentialField::value(int p, int k, int q, int l, std::size_t flat) const {
  if (p == k || q == l) return 0.0;
  return pair_sign(p, k) * pair_sign(q, l) * a[pair_index(p, k)][pair_index(q, l)][flat];
}

PotentialField potential_construct(const SampledSymField& v, const PotentialOptions& opts) {
  const GridSpec& spec = v.spec;
  if (spec.dim != 4) throw std::invalid_argument("potential grid must be four dimensional");
  double vmax = 0.0;
  for (const auto& e : v.entries) {
    for (double x : e) vmax = std::max(vmax, std::abs(x));
  }
  PotentialField out;
  out.spec = spec;
  out.divergence_max = discrete_divergence(v);
  if (out.divergence_max > opts.divergence_tolerance * std::max(1.0, vmax)) {
    throw DivergenceError("input field is not divergence free on the grid (max " +
                          std::to_string(out.divergence_max) + ")");
  }
  const std::size_t n = spec.size();

  std::array<FirstRowSkew, 4> m;
  for (int a = 0; a < 4; ++a) {
    std::array<std::vector<double>, 4> row;
    for (int b = 0; b < 4; ++b) row[b] = v.entry(a, b);
    m[a] = skew_antiderivative(spec, row, opts.parallel);
  }

  std::array<FirstRowSkew, 6> at;
  for (int pq = 0; pq < 6; ++pq) {
    const int p = kPairs[pq][0], q = kPairs[pq][1];
    std::array<std::vector<double>, 4> w;
    for (int i = 0; i < 4; ++i) {
      w[i].resize(n);
      for (std::size_t f = 0; f < n; ++f) w[i][f] = m[q].get(p, i, f) - m[p].get(q, i, f);
    }
    at[pq] = skew_antiderivative(spec, w, opts.parallel);
  }

  for (int I = 0; I < 6; ++I) {
    for (int J = 0; J < 6; ++J) {
      auto& dst = out.a[I][J];
      dst.resize(n);
      const int b = kPairs[J][0], l = kPairs[J][1];
      const int p = kPairs[I][0], k = kPairs[I][1];
      for (std::size_t f = 0; f < n; ++f) dst[f] = 0.5 * (at[I].get(b, l, f) + at[J].get(p, k, f));
    }
  }
  return out;
}

double potential_residual(const PotentialField& pf, const SampledSymField& v) {
  const GridSpec& s = pf.spec;
  double worst = 0.0;
  const long total = static_cast<long>(s.size());
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (long fi = 0; fi < total; ++fi) {
    const std::size_t i = static_cast<std::size_t>(fi);
    auto idx = s.unflatten(i);
    if (s.on_boundary(idx)) continue;
    for (const auto& [a, b] : upper_pairs()) {
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (k == a) continue;
        for (int l = 0; l < 4; ++l) {
          if (l == b) continue;
          const std::size_t sk = s.stride(k), sl = s.stride(l);
          const double hk = s.spacing(k), hl = s.spacing(l);
          auto val = [&](std::size_t f) { return pf.value(a, k, b, l, f); };
          if (k == l) {
            sum += (val(i + sk) - 2 * val(i) + val(i - sk)) / (hk * hk);
          } else {
            sum += (val(i + sk + sl) - val(i + sk - sl) - val(i - sk + sl) + val(i - sk - sl)) / (4 * hk * hl);
          }
        }
      }
      worst = std::max(worst, std::abs(sum - v.entry(a, b)[i]));
    }
  }
  return worst;
}

double potential_asymmetry(const PotentialField& p) {
  double worst = 0.0;
  for (int I = 0; I < 6; ++I) {
    for (int J = I + 1; J < 6; ++J) {
      for (std::size_t f = 0; f < p.a[I][J].size(); ++f) worst = std::max(worst, std::abs(p.a[I][J][f] - p.a[J][I][f]));
    }
  }
  return worst;
}

}  // namespace spin7
