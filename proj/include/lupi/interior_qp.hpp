#ifndef LUPI_INTERIOR_QP_HPP_
#define LUPI_INTERIOR_QP_HPP_

#include "lupi/dataset.hpp"

#include <cstddef>

namespace lupi {

/**
 * Dense convex QP in standard form
 *
 *   min 1/2 x'Hx + g'x   s.t.  A x = r,  x >= 0,
 *
 * with H positive semidefinite and A of full row rank.
 */
struct NonnegQp {
  Matrix H;
  Vector g;
  Matrix A;
  Vector r;
};

struct NonnegQpOptions {
  double tol = 1e-12;
  std::size_t max_iter = 200;
};

/// Primal-dual point with H x + g - A' lambda - z = 0 at optimality.
struct NonnegQpSolution {
  Vector x;
  Vector lambda;
  Vector z;
  std::size_t iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double mu = 0.0;
  bool converged = false;
};

/// Mehrotra predictor-corrector interior-point method.
NonnegQpSolution solve_nonneg_qp(const NonnegQp& qp, const NonnegQpOptions& opts = {});

}  // namespace lupi

#endif  // LUPI_INTERIOR_QP_HPP_
