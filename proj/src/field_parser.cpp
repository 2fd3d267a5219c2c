#include "spin7/field_parser.hpp"

#include <cctype>
#include <vector>

#include "spin7/errors.hpp"

namespace spin7 {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Poly parse_all() {
    Poly p = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected character");
    return p;
  }

  Poly expr() {
    Poly p = term();
    for (;;) {
      skip();
      if (eat('+')) {
        p += term();
      } else if (eat('-')) {
        p -= term();
      } else {
        return p;
      }
    }
  }

 private:
  Poly term() {
    Poly p = unary();
    for (;;) {
      skip();
      if (eat('*')) {
        p *= unary();
      } else if (eat('/')) {
        skip();
        Rational q = literal();
        if (q == 0) fail("division by zero");
        p = p.scaled(1 / q);
      } else {
        return p;
      }
    }
  }

  Poly unary() {
    skip();
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Poly power() {
    Poly base = primary();
    skip();
    if (!eat('^')) return base;
    skip();
    if (i_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[i_]))) fail("exponent must be a non-negative integer");
    Rational e = literal();
    if (e > 64) fail("exponent too large");
    return base.pow(static_cast<unsigned>(e.get_num().get_ui()));
  }

  Poly primary() {
    skip();
    if (i_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[i_];
    if (c == '(') {
      ++i_;
      Poly p = expr();
      skip();
      if (!eat(')')) fail("expected ')'");
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Poly(literal());
    if (s_.compare(i_, 2, "nu") == 0) {
      i_ += 2;
      if (i_ >= s_.size() || s_[i_] < '0' || s_[i_] > '3') fail("variables are nu0..nu3");
      const int k = s_[i_++] - '0';
      if (i_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[i_]))) fail("variables are nu0..nu3");
      return nu(k);
    }
    fail("expected a number, a variable or '('");
  }

  Rational literal() {
    const std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) fail("expected an integer literal");
    return Rational(mpz_class(s_.substr(start, i_ - start)));
  }

  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw ParseError(why + " at position " + std::to_string(i_) + " in \"" + s_ + "\"");
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Splits on commas outside parentheses.
std::vector<std::string> split_args(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string strip_wrapper(const std::string& s, const std::string& open, char close) {
  if (s.size() < open.size() + 1 || s.compare(0, open.size(), open) != 0 || s.back() != close) return {};
  return s.substr(open.size(), s.size() - open.size() - 1);
}

}  // namespace

Poly parse_poly(const std::string& text) { return Parser(text).parse_all(); }

SymMatrixField parse_field(const std::string& text) {
  std::string s = trim(text);
  if (s.size() >= 2 && s[0] == 'V' && trim(s.substr(1)).starts_with("=")) s = trim(trim(s.substr(1)).substr(1));
  if (s == "Id") return SymMatrixField::identity();
  if (std::string inner = strip_wrapper(s, "diag(", ')'); !inner.empty()) {
    auto args = split_args(inner);
    if (args.size() != 4) throw ParseError("diag(...) needs 4 entries, got " + std::to_string(args.size()));
    std::array<Poly, 4> d;
    for (int i = 0; i < 4; ++i) d[i] = parse_poly(args[i]);
    return SymMatrixField::diagonal(d);
  }
  if (std::string inner = strip_wrapper(s, "[", ']'); !inner.empty()) {
    auto args = split_args(inner);
    if (args.size() != 10) throw ParseError("symmetric list needs 10 entries, got " + std::to_string(args.size()));
    std::vector<Poly> e;
    for (const auto& a : args) e.push_back(parse_poly(a));
    return SymMatrixField::from_upper(e);
  }
  throw ParseError("field must be Id, diag(p0,p1,p2,p3) or a 10-entry list [..]: \"" + text + "\"");
}

}  // namespace spin7
