#pragma once

#include <optional>
#include <vector>

#include "spin7/poly.hpp"

namespace spin7 {

using QMatrix = std::vector<std::vector<Rational>>;
using QVector = std::vector<Rational>;

struct RowEchelon {
  QMatrix rows;  // reduced row echelon form, zero rows dropped
  std::vector<int> pivots;
};

RowEchelon reduce(QMatrix m, std::size_t ncols);
std::size_t rank(const QMatrix& m, std::size_t ncols);

// Solves m x = b. Returns nullopt when inconsistent; free variables are set to zero.
struct LinearSolution {
  QVector x;
  std::size_t rank = 0;
  std::size_t ncols = 0;
  bool unique() const { return rank == ncols; }
};
std::optional<LinearSolution> solve(const QMatrix& m, const QVector& b);

// Basis of {x : m x = 0}, one vector per free column.
std::vector<QVector> nullspace(const QMatrix& m, std::size_t ncols);

QMatrix transpose(const QMatrix& m);
QMatrix multiply(const QMatrix& a, const QMatrix& b);

}  // namespace spin7
