#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spin7 {

using Rational = mpq_class;

inline constexpr int kMaxVars = 8;

// Exponent vector packed one byte per variable, variable i in bits [8i, 8i+8).
using MonoKey = std::uint64_t;

inline int exponent_of(MonoKey key, int var) { return static_cast<int>((key >> (8 * var)) & 0xffu); }
MonoKey make_key(std::span<const int> exponents);
int key_degree(MonoKey key);

// Sparse multivariate polynomial with exact rational coefficients in up to eight
// variables. Terms are kept sorted by key with no zero coefficients.
class Poly {
 public:
  using Term = std::pair<MonoKey, Rational>;

  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  Poly(long c);             // NOLINT(google-explicit-constructor)
  Poly(int c) : Poly(static_cast<long>(c)) {}  // NOLINT(google-explicit-constructor)

  static Poly variable(int var);
  static Poly monomial(MonoKey key, const Rational& c);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  int total_degree() const;
  int degree_in(int var) const;
  bool depends_on(int var) const { return degree_in(var) > 0; }

  Poly derivative(int var) const;
  Rational evaluate(std::span<const Rational> point) const;
  double evaluate(std::span<const double> point) const;
  // Replaces variable i by subs[i] (missing entries leave the variable alone).
  Poly substitute(std::span<const Poly> subs) const;
  Poly pow(unsigned e) const;
  Poly scaled(const Rational& c) const;
  // Positive rational c such that (1/c) * p has coprime integer coefficients.
  Rational content() const;

  std::string to_string(std::span<const std::string> names = {}) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly operator-() const;

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }

 private:
  void add_scaled(const Poly& o, int sign);
  std::vector<Term> terms_;
};

std::string rational_to_string(const Rational& q);
std::vector<std::string> default_names(int nvars = 4);

// Polynomial ring names for the four base coordinates.
inline Poly nu(int i) { return Poly::variable(i); }

}  // namespace spin7
