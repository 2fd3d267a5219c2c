#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spin7/forms.hpp"
#include "spin7/structure.hpp"

namespace spin7 {

struct DiagonalField {
  std::array<Poly, 4> v;
  // Domain is where every listed polynomial is positive.
  std::vector<Poly> positive_on;

  SymMatrixField matrix() const { return SymMatrixField::diagonal(v); }
  bool in_domain(std::span<const double> point) const;
};

std::array<PolyForm, 4> diag_curvature_forms(const DiagonalField& f);

struct ReducedResiduals {
  std::array<Poly, 4> l_red;
  // Q-red for the pairs 01 02 03 12 13 23.
  std::array<Poly, 6> q_red;
  bool all_zero() const;
};
ReducedResiduals reduced_residuals(const DiagonalField& f);

struct DependencePattern {
  std::array<std::array<bool, 4>, 4> d{};  // d[i][j]: V_i depends on nu_j

  static DependencePattern of(const DiagonalField& f);
  DependencePattern permuted(const std::array<int, 4>& perm) const;  // d'[i][j] = d[perm[i]][perm[j]]
  bool constant(int i) const;
};

enum class CaseLabel { r32, r31, r23, r22, inconsistent };
std::string to_string(CaseLabel c);

struct Classification {
  CaseLabel label = CaseLabel::inconsistent;
  bool reducible = false;  // some V_i is constant
  // The pattern permuted by this relabeling fits the template of `label`.
  std::array<int, 4> permutation{0, 1, 2, 3};
  std::string describe() const;
};
Classification classify_case(const DependencePattern& p);
DependencePattern case_template(CaseLabel c);

DiagonalField example_family(const std::string& name);
std::vector<std::string> example_family_names();

// Affine normal form of L-red for case r31 (V1, V2, V3 = nu2, nu3, nu1).
Poly r31_residual(const Poly& v0);
// The decoupled pair for case r22 with V1 = a + b nu2 + c nu3 + d nu2 nu3:
// ((a + b nu2) V0_11, (c + d nu2) V0_11 + V0_22).
std::pair<Poly, Poly> r22_residual_pair(const Poly& v0, const Rational& a, const Rational& b, const Rational& c,
                                        const Rational& d);

// If V_i depends on exactly one variable and its L-red residual vanishes, V_i is linear
// in it. Returns false if some V_i violates this.
bool single_variable_linearity_holds(const DiagonalField& f);

}  // namespace spin7
