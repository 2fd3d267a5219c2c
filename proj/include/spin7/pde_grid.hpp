#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "spin7/grid.hpp"
#include "spin7/poly.hpp"
#include "spin7/potential.hpp"

namespace spin7 {

using GridFunction = std::function<double(const std::array<double, 4>&)>;
// Coefficient of the second derivative along `axis` at a grid point.
using AxisCoefficient = std::function<double(const std::array<double, 4>&, int axis)>;

struct SolverOptions {
  double omega = 1.8;
  long max_iterations = 1000000;
  double tolerance = 1e-12;  // on the max update, relative to the boundary data range
  bool parallel = true;
  int history_stride = 50;
};

struct SolverReport {
  long iterations = 0;
  double final_update = 0.0;
  double residual_norm = 0.0;  // max |discrete operator| over interior nodes
  std::vector<double> update_history;  // every history_stride iterations
  std::string to_json() const;
};

struct SolveResult {
  GridField field;
  SolverReport report;
};

// Red-black SOR for sum_a c_a(x) d_a^2 u = 0 with Dirichlet data on the box boundary,
// coefficients collocated at the nodes. Throws NonEllipticError if some c_a <= 0 and
// ConvergenceError at the iteration cap.
SolveResult solve_elliptic(const GridSpec& spec, std::vector<std::string> axis_names, const AxisCoefficient& coef,
                           const GridFunction& boundary, const SolverOptions& opts = {});

// nu2 V0_11 + nu3 V0_22 + nu1 V0_33 = 0 on a box in (nu1, nu2, nu3).
SolveResult solve_r31(const GridSpec& spec, const GridFunction& boundary, const SolverOptions& opts = {});
// (c + d nu2) V0_11 + V0_22 = 0 on a box in (nu1, nu2).
SolveResult solve_r22(const GridSpec& spec, double c, double d, const GridFunction& boundary,
                      const SolverOptions& opts = {});

// Evaluates p with nu_{vars[a]} set to grid coordinate a and the other variables zero.
GridFunction poly_on_axes(const Poly& p, std::vector<int> vars);
// Max |u - exact| over interior nodes.
double interior_error(const GridField& u, const GridFunction& exact);

struct ResidualNorm {
  std::string name;
  double max = 0.0;
  double l2 = 0.0;  // root mean square over interior nodes
};

// Centered-difference residuals at interior nodes of a 4D sample: divergence and the
// full elliptic system L(V) + Q(dV).
std::vector<ResidualNorm> grid_residual(const SampledSymField& v, bool parallel = true);
// Divergence, L-red and Q-red from the diagonal entries.
std::vector<ResidualNorm> grid_residual_diagonal(const SampledSymField& v, bool parallel = true);
const ResidualNorm& find_residual(const std::vector<ResidualNorm>& r, const std::string& name);

// 4D diagonal sample with V0 from an r31 solution (constant in nu0) and V1, V2, V3 =
// nu2, nu3, nu1.
SampledSymField promote_r31(const GridField& v0, double nu0_lo, double nu0_hi, int n0);

}  // namespace spin7
