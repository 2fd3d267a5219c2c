#include "spin7/poly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace spin7 {

MonoKey make_key(std::span<const int> exponents) {
  if (exponents.size() > kMaxVars) throw std::invalid_argument("too many exponents");
  MonoKey key = 0;
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0 || exponents[i] > 255) throw std::invalid_argument("exponent out of range");
    key |= static_cast<MonoKey>(exponents[i]) << (8 * i);
  }
  return key;
}

int key_degree(MonoKey key) {
  int d = 0;
  for (int v = 0; v < kMaxVars; ++v) d += exponent_of(key, v);
  return d;
}

namespace {

MonoKey key_mul(MonoKey a, MonoKey b) {
  for (int v = 0; v < kMaxVars; ++v) {
    if (exponent_of(a, v) + exponent_of(b, v) > 255) throw std::overflow_error("exponent overflow");
  }
  return a + b;
}

}  // namespace

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.emplace_back(0, c);
}

Poly::Poly(long c) {
  if (c != 0) terms_.emplace_back(0, Rational(c));
}

Poly Poly::variable(int var) {
  if (var < 0 || var >= kMaxVars) throw std::out_of_range("variable index");
  return monomial(MonoKey{1} << (8 * var), 1);
}

Poly Poly::monomial(MonoKey key, const Rational& c) {
  Poly p;
  if (c != 0) p.terms_.emplace_back(key, c);
  return p;
}

bool Poly::is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].first == 0); }

Rational Poly::constant_term() const {
  if (!terms_.empty() && terms_[0].first == 0) return terms_[0].second;
  return 0;
}

int Poly::total_degree() const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, key_degree(k));
  return d;
}

int Poly::degree_in(int var) const {
  int d = 0;
  for (const auto& [k, c] : terms_) d = std::max(d, exponent_of(k, var));
  return d;
}

Poly Poly::derivative(int var) const {
  Poly r;
  const MonoKey unit = MonoKey{1} << (8 * var);
  for (const auto& [k, c] : terms_) {
    int e = exponent_of(k, var);
    if (e == 0) continue;
    r.terms_.emplace_back(k - unit, c * e);
  }
  std::sort(r.terms_.begin(), r.terms_.end(), [](const Term& a, const Term& b) { return a.first < b.first; });
  return r;
}

Rational Poly::evaluate(std::span<const Rational> point) const {
  std::array<std::vector<Rational>, kMaxVars> powers;
  Rational total = 0;
  for (const auto& [k, c] : terms_) {
    Rational t = c;
    for (int v = 0; v < kMaxVars; ++v) {
      int e = exponent_of(k, v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) >= point.size()) throw std::out_of_range("evaluation point too short");
      auto& pw = powers[v];
      if (pw.empty()) pw.push_back(1);
      while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * point[v]);
      t *= pw[e];
    }
    total += t;
  }
  return total;
}

double Poly::evaluate(std::span<const double> point) const {
  std::vector<Rational> q(point.begin(), point.end());
  return evaluate(std::span<const Rational>(q)).get_d();
}

Poly Poly::substitute(std::span<const Poly> subs) const {
  std::array<std::vector<Poly>, kMaxVars> powers;
  Poly total;
  for (const auto& [k, c] : terms_) {
    Poly t(c);
    MonoKey kept = 0;
    for (int v = 0; v < kMaxVars; ++v) {
      int e = exponent_of(k, v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) >= subs.size()) {
        kept |= static_cast<MonoKey>(e) << (8 * v);
        continue;
      }
      auto& pw = powers[v];
      if (pw.empty()) pw.emplace_back(1);
      while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * subs[v]);
      t = t * pw[e];
    }
    if (kept != 0) t = t * monomial(kept, 1);
    total += t;
  }
  return total;
}

Poly Poly::pow(unsigned e) const {
  Poly r(1L);
  Poly base = *this;
  while (e > 0) {
    if (e & 1u) r = r * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return r;
}

Poly Poly::scaled(const Rational& c) const {
  if (c == 0) return {};
  Poly r = *this;
  for (auto& t : r.terms_) t.second *= c;
  return r;
}

Rational Poly::content() const {
  if (terms_.empty()) return 1;
  mpz_class num_gcd = 0;
  mpz_class den_lcm = 1;
  for (const auto& [k, c] : terms_) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den_mpz_t());
  }
  Rational r(num_gcd, den_lcm);
  r.canonicalize();
  return r;
}

void Poly::add_scaled(const Poly& o, int sign) {
  if (o.terms_.empty()) return;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() || b != o.terms_.end()) {
    if (b == o.terms_.end() || (a != terms_.end() && a->first < b->first)) {
      out.push_back(std::move(*a++));
    } else if (a == terms_.end() || b->first < a->first) {
      out.emplace_back(b->first, sign > 0 ? b->second : Rational(-b->second));
      ++b;
    } else {
      Rational s = sign > 0 ? Rational(a->second + b->second) : Rational(a->second - b->second);
      if (s != 0) out.emplace_back(a->first, std::move(s));
      ++a;
      ++b;
    }
  }
  terms_ = std::move(out);
}

Poly& Poly::operator+=(const Poly& o) {
  add_scaled(o, 1);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  add_scaled(o, -1);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  *this = *this * o;
  return *this;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  if (a.terms_.empty() || b.terms_.empty()) return r;
  if (a.terms_.size() == 1 || b.terms_.size() == 1) {
    const Poly& single = a.terms_.size() == 1 ? a : b;
    const Poly& other = a.terms_.size() == 1 ? b : a;
    const auto& [sk, sc] = single.terms_[0];
    r.terms_.reserve(other.terms_.size());
    for (const auto& [k, c] : other.terms_) r.terms_.emplace_back(key_mul(k, sk), c * sc);
    return r;  // adding a fixed key preserves the ordering
  }
  std::unordered_map<MonoKey, Rational> acc;
  acc.reserve(a.terms_.size() * b.terms_.size());
  Rational prod;
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      mpq_mul(prod.get_mpq_t(), ca.get_mpq_t(), cb.get_mpq_t());
      acc[key_mul(ka, kb)] += prod;
    }
  }
  r.terms_.reserve(acc.size());
  for (auto& [k, c] : acc) {
    if (c != 0) r.terms_.emplace_back(k, std::move(c));
  }
  std::sort(r.terms_.begin(), r.terms_.end(), [](const Poly::Term& x, const Poly::Term& y) { return x.first < y.first; });
  return r;
}

std::string rational_to_string(const Rational& q) { return q.get_str(); }

std::vector<std::string> default_names(int nvars) {
  std::vector<std::string> names;
  for (int i = 0; i < nvars; ++i) names.push_back("nu" + std::to_string(i));
  return names;
}

std::string Poly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first reads more naturally.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [k, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || k == 0) {
      os << rational_to_string(mag);
      wrote = true;
    }
    for (int v = 0; v < kMaxVars; ++v) {
      int e = exponent_of(k, v);
      if (e == 0) continue;
      if (wrote) os << "*";
      if (static_cast<std::size_t>(v) < names.size()) {
        os << names[v];
      } else {
        os << "x" << v;
      }
      if (e > 1) os << "^" << e;
      wrote = true;
    }
  }
  return os.str();
}

}  // namespace spin7
