#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spin7/forms.hpp"

namespace spin7 {

enum class FlatKind { stab_t2, stab_s1 };
std::string to_string(FlatKind k);
FlatKind parse_flat_kind(const std::string& s);  // "stab-T2" or "stab-S1"

// A flat model in eight real coordinates q0..q7; generator g of a form is dq_g.
//   stab-T2: (x, y, Re z1, Im z1, Re z2, Im z2, Re z3, Im z3)
//   stab-S1: (x1, x2, x3, u, Re z, Im z, Re w, Im w)
struct FlatModel {
  FlatKind kind = FlatKind::stab_t2;
  std::array<std::string, 8> coordinate_names;
  PolyForm phi;
  std::array<VectorField, 4> u;
  std::array<Poly, 4> nu;
  std::vector<int> translation_coords;
  std::vector<std::pair<int, int>> planes;  // (real, imaginary) coordinates of each complex factor
};

FlatModel flat_model(FlatKind kind);

// U(f) for a polynomial vector field.
Poly derivative_along(const VectorField& u, const Poly& f);
VectorField bracket(const VectorField& a, const VectorField& b);
PolyForm lie_derivative(const VectorField& u, const PolyForm& a);
PolyForm gradient(const Poly& f);

// (U_j ^ U_k ^ U_l) -| Phi = Phi(U_j, U_k, U_l, .) for cyclic (ijkl) starting at i.
PolyForm triple_contraction(const FlatModel& m, int i);
// d nu_i - (-1)^i (U_j ^ U_k ^ U_l) -| Phi, exactly.
std::array<PolyForm, 4> moment_identity_residuals(const FlatModel& m);

struct MomentDefect {
  double defect = 0.0;            // max over i and components of the residual
  double contraction_norm = 0.0;  // max over i and components of the contraction term
};
MomentDefect verify_moment_identities(const FlatModel& m, std::span<const double> p);

// Phi evaluated on U0..U3: vanishes when the orbits are isotropic.
Poly orbit_restriction(const FlatModel& m);

struct NuBox {
  std::array<double, 4> lo{-1, -1, -1, -1};
  std::array<double, 4> hi{1, 1, 1, 1};
};

struct GraphEdge {
  int from = 0;
  std::array<long, 4> dir{};         // primitive integer direction
  std::array<long, 4> stabilizer{};  // integer coefficients on U0..U3 of the circle generator
  bool full_line = false;            // otherwise a half-line from the vertex
  double t_min = 0.0, t_max = 0.0;   // clipped parameter range along dir
};

struct SingularGraph {
  std::vector<std::array<double, 4>> vertices;
  std::vector<GraphEdge> edges;

  // At every vertex with three half-lines the directions sum to zero.
  bool balanced() const;
  std::string to_json() const;
  void write_csv(std::ostream& os, int samples_per_edge = 11) const;
};

// Image under nu of the points with nontrivial stabilizer near p, where p has every
// complex coordinate zero. Edges are clipped to the box.
SingularGraph singular_graph(const FlatModel& m, const NuBox& box, std::span<const double> p = {});

}  // namespace spin7
