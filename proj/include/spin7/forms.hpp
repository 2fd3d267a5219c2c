#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spin7/poly.hpp"

namespace spin7 {

// A set of exterior generators. Bits 0..3 are dnu0..dnu3 and bits 4..7 are
// theta0..theta3 on the toric ansatz; the flat models use bit i for dq_i.
using GenMask = std::uint8_t;

inline constexpr int kNumGenerators = 8;
inline constexpr int dnu_gen(int i) { return i; }
inline constexpr int theta_gen(int i) { return 4 + i; }

int mask_degree(GenMask m);
// Sign of e_a ^ e_b relative to the sorted basis element e_{a|b}; 0 if they overlap.
int wedge_sign(GenMask a, GenMask b);
// Number of generators of m below generator g.
int position_in(GenMask m, int g);

// Homogeneous differential form with polynomial coefficients.
class PolyForm {
 public:
  PolyForm() = default;
  static PolyForm scalar(const Poly& f);
  static PolyForm generator(int g);
  static PolyForm basis(GenMask m, const Poly& coeff = Poly(1L));
  static PolyForm dnu(int i) { return generator(dnu_gen(i)); }
  static PolyForm theta(int i) { return generator(theta_gen(i)); }

  bool is_zero() const { return terms_.empty(); }
  int degree() const { return degree_; }
  const std::map<GenMask, Poly>& terms() const { return terms_; }
  Poly coefficient(GenMask m) const;
  void add_term(GenMask m, const Poly& coeff);
  PolyForm scaled(const Poly& f) const;
  // Keeps only terms whose mask has exactly `count` generators in `subset`.
  PolyForm filtered(GenMask subset, int count) const;

  std::string to_string(std::span<const std::string> generator_names = {},
                        std::span<const std::string> variable_names = {}) const;

  PolyForm& operator+=(const PolyForm& o);
  PolyForm& operator-=(const PolyForm& o);
  PolyForm operator-() const;
  friend PolyForm operator+(PolyForm a, const PolyForm& b) { return a += b; }
  friend PolyForm operator-(PolyForm a, const PolyForm& b) { return a -= b; }
  friend bool operator==(const PolyForm& a, const PolyForm& b) { return a.terms_ == b.terms_; }

 private:
  void check_degree(GenMask m);
  std::map<GenMask, Poly> terms_;
  int degree_ = 0;
};

PolyForm wedge(const PolyForm& a, const PolyForm& b);
PolyForm operator*(const Poly& f, const PolyForm& a);

// Exterior derivative data: variable v (v < nvars) has differential dgen_of_var[v],
// and generator g has d(e_g) = dgen[g].
struct DerivativeRules {
  int nvars = 4;
  std::array<int, kMaxVars> dgen_of_var{0, 1, 2, 3, 4, 5, 6, 7};
  std::array<PolyForm, kNumGenerators> dgen{};
};

// Rules for the toric ansatz: d(dnu_i) = 0 and d(theta_l) = omega[l].
DerivativeRules ansatz_rules(const std::array<PolyForm, 4>& omega);
// Rules for coordinate forms in eight variables, every generator closed.
DerivativeRules flat_rules();

PolyForm d(const PolyForm& a, const DerivativeRules& rules);
inline PolyForm d_flat(const PolyForm& a) { return d(a, flat_rules()); }

using VectorField = std::array<Poly, kNumGenerators>;
// Interior product X -| a where X has components X[g] along the dual of generator g.
PolyForm contract(const VectorField& x, const PolyForm& a);

// Replaces each generator g by the 1-form images[g]; coefficients are left alone.
PolyForm substitute_generators(const PolyForm& a, const std::array<PolyForm, kNumGenerators>& images);

// Hodge star for the flat metric in which the generators in `universe` are orthonormal
// and positively ordered.
PolyForm hodge_star(const PolyForm& a, GenMask universe);

using ExactForm = std::map<GenMask, Rational>;
using NumericForm = std::map<GenMask, double>;

ExactForm evaluate_exact(const PolyForm& a, std::span<const Rational> point);
NumericForm evaluate(const PolyForm& a, std::span<const double> point);
NumericForm wedge(const NumericForm& a, const NumericForm& b);
double max_abs(const NumericForm& a);
double max_abs_difference(const NumericForm& a, const NumericForm& b);

// Quotient num / den of a polynomial form by a nonzero polynomial.
struct RationalForm {
  PolyForm num;
  Poly den = Poly(1L);

  bool is_zero() const { return num.is_zero(); }
  int degree() const { return num.degree(); }
  NumericForm evaluate(std::span<const double> point) const;
  // Divides numerator and denominator by the content of the denominator.
  RationalForm normalized() const;
};

RationalForm wedge(const RationalForm& a, const RationalForm& b);
RationalForm operator+(const RationalForm& a, const RationalForm& b);
RationalForm d(const RationalForm& a, const DerivativeRules& rules);

std::vector<std::string> ansatz_generator_names();

}  // namespace spin7
