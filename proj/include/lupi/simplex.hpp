#ifndef LUPI_SIMPLEX_HPP_
#define LUPI_SIMPLEX_HPP_

#include "lupi/dataset.hpp"

namespace lupi {

struct LpFeasibility {
  bool feasible = false;
  Vector x;
  /// Optimal phase-1 objective: total absolute residual of the equalities.
  double infeasibility = 0.0;
  std::size_t pivots = 0;
};

/**
 * Phase-1 simplex for { x : A x = r, 0 <= x <= upper } with Bland's rule.
 * Entries of `upper` may be +inf. Feasible means the phase-1 optimum is at
 * most tol * (1 + |r|_1).
 */
LpFeasibility find_feasible_point(const Matrix& A, const Vector& r, const Vector& upper, double tol = 1e-9);

}  // namespace lupi

#endif  // LUPI_SIMPLEX_HPP_
