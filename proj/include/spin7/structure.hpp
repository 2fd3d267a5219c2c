#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <string>

#include "spin7/forms.hpp"
#include "spin7/poly.hpp"

namespace spin7 {

using PolyMatrix4 = std::array<std::array<Poly, 4>, 4>;
using RationalMatrix4 = std::array<std::array<Rational, 4>, 4>;

// Symmetric 4x4 matrix of polynomials in nu0..nu3.
class SymMatrixField {
 public:
  SymMatrixField() = default;
  explicit SymMatrixField(const PolyMatrix4& m);  // throws if m is not symmetric
  static SymMatrixField identity();
  static SymMatrixField diagonal(const std::array<Poly, 4>& d);
  // Upper triangle in row order: 00 01 02 03 11 12 13 22 23 33.
  static SymMatrixField from_upper(std::span<const Poly> entries);

  const Poly& operator()(int i, int j) const { return m_[i][j]; }
  const PolyMatrix4& matrix() const { return m_; }
  bool is_diagonal() const;

  Poly det() const;
  PolyMatrix4 adjugate() const;
  RationalMatrix4 evaluate(std::span<const Rational> point) const;
  Eigen::Matrix4d evaluate(std::span<const double> point) const;

 private:
  PolyMatrix4 m_{};
};

Poly det4(const PolyMatrix4& m);
PolyMatrix4 adjugate4(const PolyMatrix4& m);
Rational det4(const RationalMatrix4& m);
RationalMatrix4 adjugate4(const RationalMatrix4& m);
RationalMatrix4 inverse4(const RationalMatrix4& m);

// The four cyclic quadruples (ijkl) = (0123), (1230), (2301), (3012).
struct CyclicQuad {
  int i, j, k, l;
};
std::array<CyclicQuad, 4> cyclic_quadruples();

// The flat Spin(7) 4-form on the eight generators e0..e7 (generator i is e_i).
PolyForm model_phi0();
// The associated flat G2 3-form on e1..e7.
PolyForm model_phi0_g2();
inline constexpr GenMask kAllGenerators = 0xff;

// Phi of the toric ansatz, as numerator over denominator 2 det V.
RationalForm assemble_phi(const SymMatrixField& v);
// The pieces of Phi: det(V) * a + b + (c ^ c) / (2 det V).
struct PhiParts {
  Poly det;
  PolyForm a;  // sum over cyclic (ijkl) of (-1)^i theta_i ^ dnu_jkl
  PolyForm b;  // sum over cyclic (ijkl) of (-1)^l theta_ijk ^ dnu_l
  PolyForm c;  // sum of adj(V)_ab dnu_a ^ theta_b
};
PhiParts phi_parts(const SymMatrixField& v);

struct RatFunc {
  Poly num;
  Poly den = Poly(1L);
  double evaluate(std::span<const double> point) const;
  Rational evaluate(std::span<const Rational> point) const;
};

// Metric in the generator basis (index = generator number): theta-block V^{-1},
// dnu-block adj(V), no mixed terms.
struct MetricField {
  std::array<std::array<RatFunc, 8>, 8> g;
  Eigen::Matrix<double, 8, 8> evaluate(std::span<const double> point) const;
};
MetricField assemble_metric(const SymMatrixField& v);

// Throws DegenerateFieldError when det V vanishes identically.
void require_nondegenerate(const SymMatrixField& v);

}  // namespace spin7
