#include "spin7/linalg_exact.hpp"

#include <stdexcept>

namespace spin7 {

RowEchelon reduce(QMatrix m, std::size_t ncols) {
  RowEchelon r;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < m.size(); ++col) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    Rational inv = 1 / m[row][col];
    for (std::size_t c = col; c < ncols; ++c) m[row][c] *= inv;
    for (std::size_t other = 0; other < m.size(); ++other) {
      if (other == row || m[other][col] == 0) continue;
      Rational f = m[other][col];
      for (std::size_t c = col; c < ncols; ++c) {
        if (m[row][c] != 0) m[other][c] -= f * m[row][c];
      }
    }
    r.pivots.push_back(static_cast<int>(col));
    ++row;
  }
  m.resize(row);
  r.rows = std::move(m);
  return r;
}

std::size_t rank(const QMatrix& m, std::size_t ncols) { return reduce(m, ncols).rows.size(); }

std::optional<LinearSolution> solve(const QMatrix& m, const QVector& b) {
  if (m.size() != b.size()) throw std::invalid_argument("dimension mismatch");
  std::size_t ncols = m.empty() ? 0 : m[0].size();
  QMatrix aug = m;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  RowEchelon e = reduce(aug, ncols + 1);
  LinearSolution s;
  s.ncols = ncols;
  s.x.assign(ncols, 0);
  for (std::size_t i = 0; i < e.rows.size(); ++i) {
    if (static_cast<std::size_t>(e.pivots[i]) == ncols) return std::nullopt;
    s.x[e.pivots[i]] = e.rows[i][ncols];
  }
  s.rank = e.rows.size();
  return s;
}

QMatrix transpose(const QMatrix& m) {
  if (m.empty()) return {};
  QMatrix t(m[0].size(), QVector(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  }
  return t;
}

QMatrix multiply(const QMatrix& a, const QMatrix& b) {
  if (a.empty()) return {};
  QMatrix r(a.size(), QVector(b.empty() ? 0 : b[0].size(), 0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < b[k].size(); ++j) r[i][j] += a[i][k] * b[k][j];
    }
  }
  return r;
}

}  // namespace spin7

namespace spin7 {

std::vector<QVector> nullspace(const QMatrix& m, std::size_t ncols) {
  RowEchelon e = reduce(m, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (int p : e.pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t f = 0; f < ncols; ++f) {
    if (is_pivot[f]) continue;
    QVector x(ncols, Rational(0));
    x[f] = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = -e.rows[r][f];
    basis.push_back(std::move(x));
  }
  return basis;
}

}  // namespace spin7
