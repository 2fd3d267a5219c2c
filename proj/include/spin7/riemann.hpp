#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spin7/forms.hpp"
#include "spin7/structure.hpp"

namespace spin7 {

using Mat8 = Eigen::Matrix<double, 8, 8>;

// Value, gradient and Hessian in the four base variables at a point.
struct Jet2 {
  double v = 0.0;
  std::array<double, 4> d{};
  std::array<std::array<double, 4>, 4> dd{};
};

// Precomputed derivatives of a polynomial up to order two.
struct PolyJet {
  Poly p;
  std::array<Poly, 4> d;
  std::array<std::array<Poly, 4>, 4> dd;

  explicit PolyJet(const Poly& q = Poly());
  Jet2 at(std::span<const double> point) const;
};

// Jet of n / d from the jets of n and d.
Jet2 quotient(const Jet2& n, const Jet2& d);

// Local primitives A_l with dA_l = omega_l, by the homotopy formula from the origin.
// Throws std::invalid_argument unless each omega_l is a closed 2-form in the dnu.
std::array<PolyForm, 4> gauge_potential(const std::array<PolyForm, 4>& omega);

// The metric in coordinates (t0..t3, nu0..nu3) with theta_l = dt_l + A_l, written as
// num / det(V).
struct MetricChart {
  SymMatrixField v;
  std::array<PolyForm, 4> omega;
  std::array<PolyForm, 4> potential;
  RationalForm phi;
  PolyJet den;
  std::array<std::array<PolyJet, 8>, 8> num;

  static MetricChart from_field(const SymMatrixField& v);
  Mat8 metric(std::span<const double> nu) const;
  // a[l][i]: coefficient of dnu_i in A_l at nu.
  Eigen::Matrix4d potential_at(std::span<const double> nu) const;
};

enum class Differentiation { exact, finite_difference };

struct CurvatureOptions {
  Differentiation method = Differentiation::exact;
  double h = 1e-3;
  double max_condition = 1e10;
};

// Rank-4 tensor on an 8-dimensional space, index ((a*8 + b)*8 + c)*8 + d.
struct Tensor4 {
  std::vector<double> x = std::vector<double>(4096, 0.0);
  double& operator()(int a, int b, int c, int d) { return x[((a * 8 + b) * 8 + c) * 8 + d]; }
  double operator()(int a, int b, int c, int d) const { return x[((a * 8 + b) * 8 + c) * 8 + d]; }
  double norm() const;
  Tensor4 transformed(const Mat8& e) const;  // T'_{abcd} = T_{pqrs} e_pa e_qb e_rc e_sd
};

struct CurvatureSample {
  std::array<double, 4> point{};
  Mat8 frame;        // columns: Gram-Schmidt orthonormal frame in coordinate components
  Tensor4 r;         // R_abcd in that frame
  Mat8 ricci;        // frame components
  std::array<Mat8, 28> endo;  // endo[pair] = R(e_c ^ e_d) for c < d, entries R_abcd
  Tensor4 phi;       // Phi_p in the frame
  Mat8 to_adapted;   // orthogonal Q: adapted frame = frame * Q

  double ricci_relative() const;
  double pair_symmetry_defect() const;
  double bianchi_defect() const;
};

// Christoffel symbols of the first kind Gamma_{c,ab} in coordinates, index (c, a, b).
std::array<Mat8, 8> christoffel(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts = {});
// R_abcd in coordinates.
Tensor4 riemann_coordinates(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts = {});

CurvatureSample curvature_at(const MetricChart& chart, std::span<const double> p, const CurvatureOptions& opts = {});
// Finite differences at h and h/2 combined as (4 R(h/2) - R(h)) / 3.
CurvatureSample curvature_richardson(const MetricChart& chart, std::span<const double> p, double h);
std::vector<CurvatureSample> curvature_samples(const MetricChart& chart, const std::vector<std::array<double, 4>>& points,
                                               const CurvatureOptions& opts = {}, bool parallel = true);

struct Membership {
  bool member = false;
  double defect = 0.0;  // |S . Phi| / |S|
};
// Derivation action of the skew matrix S on the 4-form phi (both in one orthonormal frame).
Tensor4 derivation_action(const Mat8& s, const Tensor4& phi);
Membership spin7_membership(const Mat8& s, const Tensor4& phi, double tol = 1e-6);

struct HolonomySpan {
  int dimension = 0;
  std::vector<double> singular_values;
  double min_gap = 0.0;  // sigma_r / sigma_{r+1}; infinite when nothing lies below the cut
  std::vector<double> membership_defects;
  double max_defect = 0.0;
};
// Endomorphisms are moved to the Phi-adapted frame of each sample before stacking.
HolonomySpan holonomy_span(const std::vector<CurvatureSample>& samples, double rel_threshold = 1e-7);

std::string holonomy_report_json(const std::string& family, const std::vector<CurvatureSample>& samples, double h,
                                 const HolonomySpan& span);

}  // namespace spin7
