#include "lupi/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace lupi {

LpFeasibility find_feasible_point(const Matrix& A, const Vector& r, const Vector& upper, double tol) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = A.cols();
  if (r.size() != m || upper.size() != n) throw InvalidInput("simplex: inconsistent dimensions");
  if ((upper.array() < 0.0).any()) throw InvalidInput("simplex: negative upper bound");

  std::vector<Eigen::Index> bounded;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(upper[j])) bounded.push_back(j);
  }
  const auto nb = static_cast<Eigen::Index>(bounded.size());
  // Columns: x (n), bound slacks (nb), artificials (m), rhs.
  const Eigen::Index cols = n + nb + m;
  const Eigen::Index rows = m + nb;
  Matrix T = Matrix::Zero(rows + 1, cols + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = r[i] < 0.0 ? -1.0 : 1.0;
    T.row(i).head(n) = sign * A.row(i);
    T(i, n + nb + i) = 1.0;
    T(i, cols) = sign * r[i];
    basis[static_cast<std::size_t>(i)] = n + nb + i;
  }
  for (Eigen::Index k = 0; k < nb; ++k) {
    T(m + k, bounded[static_cast<std::size_t>(k)]) = 1.0;
    T(m + k, n + k) = 1.0;
    T(m + k, cols) = upper[bounded[static_cast<std::size_t>(k)]];
    basis[static_cast<std::size_t>(m + k)] = n + k;
  }
  // Reduced costs of  min sum(artificials).
  for (Eigen::Index i = 0; i < m; ++i) T.row(rows) -= T.row(i);
  for (Eigen::Index i = 0; i < m; ++i) T(rows, n + nb + i) = 0.0;

  const double scale = 1.0 + r.cwiseAbs().sum();
  const double eps = 1e-12 * std::max(1.0, T.topRows(rows).cwiseAbs().maxCoeff());
  LpFeasibility out;
  const std::size_t cap = 50'000;
  while (out.pivots < cap) {
    Eigen::Index enter = -1;
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (T(rows, j) < -eps) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (T(i, enter) > eps) {
        const double ratio = T(i, cols) / T(i, enter);
        if (ratio < best - 1e-15 ||
            (ratio <= best + 1e-15 && leave >= 0 && basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
          best = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase 1
    T.row(leave) /= T(leave, enter);
    for (Eigen::Index i = 0; i <= rows; ++i) {
      if (i != leave && T(i, enter) != 0.0) T.row(i) -= T(i, enter) * T.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    ++out.pivots;
  }

  out.x = Vector::Zero(n);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Eigen::Index var = basis[static_cast<std::size_t>(i)];
    if (var < n) out.x[var] = T(i, cols);
  }
  out.x = out.x.cwiseMax(0.0).cwiseMin(upper);
  out.infeasibility = (A * out.x - r).cwiseAbs().sum();
  out.feasible = out.infeasibility <= tol * scale;
  return out;
}

}  // namespace lupi
