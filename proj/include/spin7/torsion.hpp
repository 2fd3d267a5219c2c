#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spin7/forms.hpp"
#include "spin7/linalg_exact.hpp"
#include "spin7/structure.hpp"

namespace spin7 {

std::array<Poly, 4> divergence_residual(const SymMatrixField& v);
bool is_divergence_free(const SymMatrixField& v);

// z[l][i][j] = z^{ij}_l, skew in (i, j).
struct CurvatureSet {
  std::array<PolyMatrix4, 4> z{};

  PolyForm omega(int l) const;
  std::array<PolyForm, 4> omegas() const;
  DerivativeRules rules() const { return ansatz_rules(omegas()); }
};

// The closed-form curvature coefficients in terms of V and dV.
CurvatureSet curvature_matrices(const SymMatrixField& v);

// d(Phi) with d(theta_l) = omega_l from z, as numerator over 2 det(V)^2.
RationalForm oracle_dphi(const SymMatrixField& v, const CurvatureSet& z);

// The affine field V(p) + dV(p)(nu - p), as a function of local coordinates x = nu - p.
SymMatrixField linear_jet(const SymMatrixField& v, std::span<const Rational> p);

// d(Phi) at p from the first jet of V and constant curvature coefficients.
ExactForm dphi_at(const SymMatrixField& v, std::span<const Rational> p, const std::array<RationalMatrix4, 4>& z);
std::array<RationalMatrix4, 4> evaluate_curvature(const CurvatureSet& z, std::span<const Rational> p);

// Solves d(Phi)(p) = 0 for the 24 curvature coefficients at p. nullopt means the
// closedness system is inconsistent at p.
std::optional<std::array<RationalMatrix4, 4>> solve_curvature_at(const SymMatrixField& v, std::span<const Rational> p);

// d(Phi)(p), with the closed-form coefficients, is linear in the 40 first derivatives of V.
// `spanned` reports whether that linear map factors through the four divergence
// residuals, in which case dphi(p) = factor * residual(p).
struct DivergenceFactorization {
  bool spanned = false;
  std::vector<GenMask> masks;
  QMatrix factor;  // masks.size() x 4
  QVector residual;
  ExactForm dphi;
};
DivergenceFactorization divergence_factorization(const SymMatrixField& v, std::span<const Rational> p);

using SymPolyMatrix = PolyMatrix4;
SymPolyMatrix operator_L(const SymMatrixField& v);
SymPolyMatrix operator_Q(const SymMatrixField& v);
SymPolyMatrix elliptic_residual(const SymMatrixField& v);

// Upper-triangle order used for the ten independent entries.
std::array<std::pair<int, int>, 10> upper_pairs();

// d(omega_l) for the closed-form curvature coefficients.
std::array<PolyForm, 4> oracle_domega(const SymMatrixField& v);
// The sixteen components (l, abc) of the d(omega_l) in the order l major, abc in
// (012, 013, 023, 123).
std::array<Poly, 16> domega_components(const SymMatrixField& v);

// For divergence-free V: domega_components = C * (ten entries of the elliptic residual).
using Correspondence = std::array<std::array<int, 10>, 16>;
const Correspondence& stored_correspondence();
// Exact least-squares-free recovery of C from sample values; nullopt if the samples
// are inconsistent with any linear relation or do not determine it.
std::optional<QMatrix> recompute_correspondence(const std::vector<SymMatrixField>& fields,
                                                const std::vector<std::vector<Rational>>& points);
// A rational left inverse of the stored C: elliptic entries = P * domega components.
QMatrix correspondence_left_inverse();

struct Deviation {
  std::string formula_id;
  std::vector<int> index_tuple;
  std::string printed_term;
  std::string oracle_term;
};
// Compares the closed-form coefficients against solve_curvature_at, and the elliptic
// residual against the d(omega) oracle, at the given sample points.
std::vector<Deviation> formula_deviations(const std::vector<SymMatrixField>& fields,
                                          const std::vector<std::vector<Rational>>& points);
std::string deviations_json(const std::vector<Deviation>& devs);

struct GL4Action {
  RationalMatrix4 a;

  explicit GL4Action(const RationalMatrix4& m);  // throws on singular m
  static GL4Action identity();
  static GL4Action scaling(const Rational& t);
  GL4Action compose(const GL4Action& other) const;  // this * other

  Rational det() const;
  RationalMatrix4 inverse_transpose() const;
  // nu' = cof(A) nu = det(A) A^{-T} nu
  RationalMatrix4 nu_map() const;
  RationalMatrix4 theta_map() const { return inverse_transpose(); }
};

// V'(nu') = A^{-T} V(nu) A^{-1} with nu = cof(A)^{-1} nu'.
SymMatrixField gl4_transform(const SymMatrixField& v, const GL4Action& g);
// Pulls a polynomial in nu' back to nu.
Poly pull_back_to_nu(const Poly& f, const GL4Action& g);

// Power w with elliptic_residual(tId . V)(t^3 nu) = t^w elliptic_residual(V)(nu),
// or nullopt when the entries do not share one power.
std::optional<int> elliptic_scaling_weight(const SymMatrixField& v, const Rational& t);

}  // namespace spin7
