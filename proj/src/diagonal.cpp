#include "spin7/diagonal.hpp"

#include <algorithm>
#include <stdexcept>

namespace spin7 {

bool DiagonalField::in_domain(std::span<const double> point) const {
  for (const auto& p : positive_on) {
    if (!(p.evaluate(point) > 0.0)) return false;
  }
  return true;
}

namespace {

PolyForm dnu2(int i, int j) { return wedge(PolyForm::dnu(i), PolyForm::dnu(j)); }

}  // namespace

std::array<PolyForm, 4> diag_curvature_forms(const DiagonalField& f) {
  const auto& v = f.v;
  auto dv = [&](int i, int j) { return v[i].derivative(j); };
  std::array<PolyForm, 4> w;
  w[0] = dnu2(1, 2).scaled(-(v[3] * dv(0, 3))) + dnu2(1, 3).scaled(v[2] * dv(0, 2)) - dnu2(2, 3).scaled(v[1] * dv(0, 1));
  w[1] = dnu2(0, 2).scaled(v[3] * dv(1, 3)) - dnu2(0, 3).scaled(v[2] * dv(1, 2)) + dnu2(2, 3).scaled(v[0] * dv(1, 0));
  w[2] = dnu2(0, 1).scaled(-(v[3] * dv(2, 3))) + dnu2(0, 3).scaled(v[1] * dv(2, 1)) - dnu2(1, 3).scaled(v[0] * dv(2, 0));
  w[3] = dnu2(0, 1).scaled(v[2] * dv(3, 2)) - dnu2(0, 2).scaled(v[1] * dv(3, 1)) + dnu2(1, 2).scaled(v[0] * dv(3, 0));
  return w;
}

bool ReducedResiduals::all_zero() const {
  return std::all_of(l_red.begin(), l_red.end(), [](const Poly& p) { return p.is_zero(); }) &&
         std::all_of(q_red.begin(), q_red.end(), [](const Poly& p) { return p.is_zero(); });
}

ReducedResiduals reduced_residuals(const DiagonalField& f) {
  ReducedResiduals r;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) r.l_red[i] += f.v[j] * f.v[i].derivative(j).derivative(j);
  }
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) r.q_red[n++] = f.v[i].derivative(j) * f.v[j].derivative(i);
  }
  return r;
}

DependencePattern DependencePattern::of(const DiagonalField& f) {
  DependencePattern p;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) p.d[i][j] = (i != j) && f.v[i].depends_on(j);
  }
  return p;
}

DependencePattern DependencePattern::permuted(const std::array<int, 4>& perm) const {
  DependencePattern p;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) p.d[i][j] = d[perm[i]][perm[j]];
  }
  return p;
}

bool DependencePattern::constant(int i) const { return std::none_of(d[i].begin(), d[i].end(), [](bool b) { return b; }); }

std::string to_string(CaseLabel c) {
  switch (c) {
    case CaseLabel::r32: return "r32";
    case CaseLabel::r31: return "r31";
    case CaseLabel::r23: return "r23";
    case CaseLabel::r22: return "r22";
    default: return "inconsistent";
  }
}

std::string Classification::describe() const {
  if (label == CaseLabel::inconsistent) return "inconsistent";
  return to_string(label) + (reducible ? "+reducible" : "");
}

DependencePattern case_template(CaseLabel c) {
  std::vector<std::vector<int>> deps;
  switch (c) {
    case CaseLabel::r32: deps = {{1, 2, 3}, {2, 3}, {3}, {}}; break;
    case CaseLabel::r31: deps = {{1, 2, 3}, {2}, {3}, {1}}; break;
    case CaseLabel::r23: deps = {{1, 3}, {2, 3}, {0, 3}, {}}; break;
    case CaseLabel::r22: deps = {{1, 2}, {2, 3}, {3}, {0}}; break;
    default: throw std::invalid_argument("no template for an inconsistent pattern");
  }
  DependencePattern p;
  for (int i = 0; i < 4; ++i) {
    for (int j : deps[i]) p.d[i][j] = true;
  }
  return p;
}

Classification classify_case(const DependencePattern& p) {
  Classification out;
  for (int i = 0; i < 4; ++i) out.reducible = out.reducible || p.constant(i);
  // Irreducible cases are preferred when a pattern fits several templates.
  for (CaseLabel c : {CaseLabel::r31, CaseLabel::r22, CaseLabel::r32, CaseLabel::r23}) {
    DependencePattern t = case_template(c);
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
      DependencePattern q = p.permuted(perm);
      bool fits = true;
      for (int i = 0; i < 4 && fits; ++i) {
        for (int j = 0; j < 4 && fits; ++j) fits = !q.d[i][j] || t.d[i][j];
      }
      if (fits) {
        out.label = c;
        out.permutation = perm;
        return out;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  out.label = CaseLabel::inconsistent;
  return out;
}

std::vector<std::string> example_family_names() { return {"linear-cycle", "triple-product", "cubic"}; }

DiagonalField example_family(const std::string& name) {
  DiagonalField f;
  if (name == "linear-cycle") {
    f.v = {nu(1), nu(2), nu(3), nu(0)};
    f.positive_on = {nu(0), nu(1), nu(2), nu(3)};
  } else if (name == "triple-product") {
    f.v = {nu(1) * nu(2) * nu(3), nu(2), nu(3), nu(1)};
    f.positive_on = {nu(1), nu(2), nu(3)};
  } else if (name == "cubic") {
    Poly v0 = nu(1).pow(3) * nu(3) + nu(2).pow(3) * nu(1) - nu(3).pow(3) * nu(2).scaled(2);
    f.v = {v0, nu(2), nu(3), nu(1)};
    f.positive_on = {v0, nu(1), nu(2), nu(3)};
  } else {
    throw std::invalid_argument("unknown family: " + name);
  }
  return f;
}

Poly r31_residual(const Poly& v0) {
  auto d2 = [&](int j) { return v0.derivative(j).derivative(j); };
  return nu(2) * d2(1) + nu(3) * d2(2) + nu(1) * d2(3);
}

std::pair<Poly, Poly> r22_residual_pair(const Poly& v0, const Rational& a, const Rational& b, const Rational& c,
                                        const Rational& d) {
  Poly v11 = v0.derivative(1).derivative(1), v22 = v0.derivative(2).derivative(2);
  Poly first = (Poly(a) + nu(2).scaled(b)) * v11;
  Poly second = (Poly(c) + nu(2).scaled(d)) * v11 + v22;
  return {first, second};
}

bool single_variable_linearity_holds(const DiagonalField& f) {
  auto res = reduced_residuals(f);
  auto pat = DependencePattern::of(f);
  for (int i = 0; i < 4; ++i) {
    int count = 0, var = -1;
    for (int j = 0; j < 4; ++j) {
      if (pat.d[i][j]) {
        ++count;
        var = j;
      }
    }
    if (count != 1 || !res.l_red[i].is_zero()) continue;
    if (!f.v[i].derivative(var).derivative(var).is_zero()) return false;
  }
  return true;
}

}  // namespace spin7
