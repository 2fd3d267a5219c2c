#pragma once

#include <array>
#include <vector>

#include "spin7/grid.hpp"
#include "spin7/structure.hpp"

namespace spin7 {

// Symmetric matrix field sampled on a 4D grid; entries in upper_pairs order.
struct SampledSymField {
  GridSpec spec;
  std::array<std::vector<double>, 10> entries;

  static SampledSymField sample(const SymMatrixField& v, const GridSpec& spec);
  const std::vector<double>& entry(int a, int b) const;
};

// Index of the unordered pair {i, j} (i != j) in 01 02 03 12 13 23 order.
int pair_index(int i, int j);
// +1 if i < j, -1 otherwise.
int pair_sign(int i, int j);

struct PotentialOptions {
  double divergence_tolerance = 1e-8;  // relative to max |V|
  bool parallel = true;
};

// a[I][J] holds A_{I,*J} for index pairs I, J; the matrix is symmetric, so
// A_{ij,*kl} = A_{kl,*ij}, and V_ab = sum_kl d_k d_l A_{ak,*bl} with the pair signs.
struct PotentialField {
  GridSpec spec;
  std::array<std::array<std::vector<double>, 6>, 6> a;
  double divergence_max = 0.0;

  double value(int p, int k, int q, int l, std::size_t flat) const;
};

PotentialField potential_construct(const SampledSymField& v, const PotentialOptions& opts = {});

// Max over interior points of |V_ab - sum_kl D_k D_l A_{ak,*bl}| with centered differences.
double potential_residual(const PotentialField& p, const SampledSymField& v);
// Max |A_{I,*J} - A_{J,*I}|.
double potential_asymmetry(const PotentialField& p);
// Max discrete divergence (second-order differences, one-sided at faces).
double discrete_divergence(const SampledSymField& v);

// Cumulative integral along `axis` from the low face with a cubic-exact rule.
std::vector<double> cumulative_integral(const GridSpec& spec, const std::vector<double>& f, int axis, bool parallel);

}  // namespace spin7
