#include "spin7/forms.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spin7 {

int mask_degree(GenMask m) { return std::popcount(static_cast<unsigned>(m)); }

int position_in(GenMask m, int g) { return std::popcount(static_cast<unsigned>(m) & ((1u << g) - 1u)); }

int wedge_sign(GenMask a, GenMask b) {
  if (a & b) return 0;
  int swaps = 0;
  for (int g = 0; g < kNumGenerators; ++g) {
    if (b & (1u << g)) swaps += std::popcount(static_cast<unsigned>(a) >> (g + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

PolyForm PolyForm::scalar(const Poly& f) { return basis(0, f); }

PolyForm PolyForm::generator(int g) {
  if (g < 0 || g >= kNumGenerators) throw std::out_of_range("generator index");
  return basis(static_cast<GenMask>(1u << g));
}

PolyForm PolyForm::basis(GenMask m, const Poly& coeff) {
  PolyForm f;
  f.degree_ = mask_degree(m);
  if (!coeff.is_zero()) f.terms_.emplace(m, coeff);
  return f;
}

Poly PolyForm::coefficient(GenMask m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Poly() : it->second;
}

void PolyForm::check_degree(GenMask m) {
  if (terms_.empty()) {
    degree_ = mask_degree(m);
  } else if (mask_degree(m) != degree_) {
    throw std::invalid_argument("inhomogeneous form");
  }
}

void PolyForm::add_term(GenMask m, const Poly& coeff) {
  if (coeff.is_zero()) return;
  check_degree(m);
  auto [it, inserted] = terms_.try_emplace(m, coeff);
  if (!inserted) {
    it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

PolyForm PolyForm::scaled(const Poly& f) const {
  PolyForm r;
  r.degree_ = degree_;
  if (f.is_zero()) return r;
  for (const auto& [m, c] : terms_) r.terms_.emplace(m, c * f);
  return r;
}

PolyForm PolyForm::filtered(GenMask subset, int count) const {
  PolyForm r;
  r.degree_ = degree_;
  for (const auto& [m, c] : terms_) {
    if (mask_degree(static_cast<GenMask>(m & subset)) == count) r.terms_.emplace(m, c);
  }
  return r;
}

PolyForm& PolyForm::operator+=(const PolyForm& o) {
  if (o.terms_.empty()) return *this;
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

PolyForm& PolyForm::operator-=(const PolyForm& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

PolyForm PolyForm::operator-() const {
  PolyForm r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

std::string PolyForm::to_string(std::span<const std::string> generator_names,
                                std::span<const std::string> variable_names) const {
  if (terms_.empty()) return "0";
  std::vector<std::string> gnames(generator_names.begin(), generator_names.end());
  if (gnames.empty()) gnames = ansatz_generator_names();
  std::vector<std::string> vnames(variable_names.begin(), variable_names.end());
  if (vnames.empty()) vnames = default_names(4);
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.to_string(vnames) << ")";
    for (int g = 0; g < kNumGenerators; ++g) {
      if (m & (1u << g)) os << (g == 0 || !(m & ((1u << g) - 1u)) ? " " : "^") << gnames[g];
    }
  }
  return os.str();
}

PolyForm wedge(const PolyForm& a, const PolyForm& b) {
  PolyForm r;
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      int s = wedge_sign(ma, mb);
      if (s == 0) continue;
      Poly c = ca * cb;
      r.add_term(static_cast<GenMask>(ma | mb), s > 0 ? c : -c);
    }
  }
  return r;
}

PolyForm operator*(const Poly& f, const PolyForm& a) { return a.scaled(f); }

DerivativeRules ansatz_rules(const std::array<PolyForm, 4>& omega) {
  DerivativeRules r;
  r.nvars = 4;
  for (int l = 0; l < 4; ++l) {
    if (!omega[l].is_zero() && omega[l].degree() != 2) throw std::invalid_argument("curvature forms must be 2-forms");
    r.dgen[theta_gen(l)] = omega[l];
  }
  return r;
}

DerivativeRules flat_rules() {
  DerivativeRules r;
  r.nvars = 8;
  return r;
}

PolyForm d(const PolyForm& a, const DerivativeRules& rules) {
  PolyForm r;
  for (const auto& [m, c] : a.terms()) {
    for (int v = 0; v < rules.nvars; ++v) {
      if (!c.depends_on(v)) continue;
      GenMask g = static_cast<GenMask>(1u << rules.dgen_of_var[v]);
      int s = wedge_sign(g, m);
      if (s == 0) continue;
      Poly dc = c.derivative(v);
      r.add_term(static_cast<GenMask>(g | m), s > 0 ? dc : -dc);
    }
    for (int g = 0; g < kNumGenerators; ++g) {
      if (!(m & (1u << g)) || rules.dgen[g].is_zero()) continue;
      GenMask rest = static_cast<GenMask>(m & ~(1u << g));
      // d(e_g) is even, so moving it to the front costs only the Leibniz sign.
      int s = (position_in(m, g) & 1) ? -1 : 1;
      for (const auto& [mo, co] : rules.dgen[g].terms()) {
        int t = wedge_sign(mo, rest);
        if (t == 0) continue;
        Poly term = c * co;
        r.add_term(static_cast<GenMask>(mo | rest), s * t > 0 ? term : -term);
      }
    }
  }
  return r;
}

PolyForm contract(const VectorField& x, const PolyForm& a) {
  PolyForm r;
  for (const auto& [m, c] : a.terms()) {
    for (int g = 0; g < kNumGenerators; ++g) {
      if (!(m & (1u << g)) || x[g].is_zero()) continue;
      Poly term = x[g] * c;
      r.add_term(static_cast<GenMask>(m & ~(1u << g)), (position_in(m, g) & 1) ? -term : term);
    }
  }
  return r;
}

PolyForm substitute_generators(const PolyForm& a, const std::array<PolyForm, kNumGenerators>& images) {
  PolyForm r;
  for (const auto& [m, c] : a.terms()) {
    PolyForm t = PolyForm::scalar(c);
    for (int g = 0; g < kNumGenerators; ++g) {
      if (m & (1u << g)) t = wedge(t, images[g]);
    }
    r += t;
  }
  return r;
}

PolyForm hodge_star(const PolyForm& a, GenMask universe) {
  PolyForm r;
  for (const auto& [m, c] : a.terms()) {
    if ((m & ~universe) != 0) throw std::invalid_argument("form not supported on the star universe");
    GenMask comp = static_cast<GenMask>(universe & ~m);
    int s = wedge_sign(m, comp);
    r.add_term(comp, s > 0 ? c : -c);
  }
  return r;
}

ExactForm evaluate_exact(const PolyForm& a, std::span<const Rational> point) {
  ExactForm r;
  for (const auto& [m, c] : a.terms()) {
    Rational v = c.evaluate(point);
    if (v != 0) r.emplace(m, v);
  }
  return r;
}

NumericForm evaluate(const PolyForm& a, std::span<const double> point) {
  std::vector<Rational> q(point.begin(), point.end());
  NumericForm r;
  for (const auto& [m, v] : evaluate_exact(a, q)) r.emplace(m, v.get_d());
  return r;
}

NumericForm wedge(const NumericForm& a, const NumericForm& b) {
  NumericForm r;
  for (const auto& [ma, ca] : a) {
    for (const auto& [mb, cb] : b) {
      int s = wedge_sign(ma, mb);
      if (s != 0) r[static_cast<GenMask>(ma | mb)] += s * ca * cb;
    }
  }
  return r;
}

double max_abs(const NumericForm& a) {
  double m = 0.0;
  for (const auto& [k, v] : a) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_difference(const NumericForm& a, const NumericForm& b) {
  NumericForm diff = a;
  for (const auto& [k, v] : b) diff[k] -= v;
  return max_abs(diff);
}

NumericForm RationalForm::evaluate(std::span<const double> point) const {
  std::vector<Rational> q(point.begin(), point.end());
  Rational dv = den.evaluate(std::span<const Rational>(q));
  if (dv == 0) throw std::domain_error("denominator vanishes at evaluation point");
  NumericForm r;
  for (const auto& [m, v] : evaluate_exact(num, q)) r.emplace(m, Rational(v / dv).get_d());
  return r;
}

RationalForm RationalForm::normalized() const {
  Rational c = den.content();
  if (!den.terms().empty() && den.terms().back().second < 0) c = -c;
  Rational inv = 1 / c;
  return {num.scaled(Poly(inv)), den.scaled(inv)};
}

RationalForm wedge(const RationalForm& a, const RationalForm& b) { return {wedge(a.num, b.num), a.den * b.den}; }

RationalForm operator+(const RationalForm& a, const RationalForm& b) {
  if (a.den == b.den) return {a.num + b.num, a.den};
  return {a.num.scaled(b.den) + b.num.scaled(a.den), a.den * b.den};
}

RationalForm d(const RationalForm& a, const DerivativeRules& rules) {
  PolyForm dden = d(PolyForm::scalar(a.den), rules);
  PolyForm num = d(a.num, rules).scaled(a.den) - wedge(dden, a.num);
  return {num, a.den * a.den};
}

std::vector<std::string> ansatz_generator_names() {
  return {"dnu0", "dnu1", "dnu2", "dnu3", "theta0", "theta1", "theta2", "theta3"};
}

}  // namespace spin7
