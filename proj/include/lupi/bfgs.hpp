#ifndef LUPI_BFGS_HPP_
#define LUPI_BFGS_HPP_

#include "lupi/dataset.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace lupi {

/// Returns f(x) and writes its gradient; a non-finite value marks x as rejected.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct BfgsOptions {
  std::size_t max_iter = 200;
  double grad_tol = 1e-6;
  double c1 = 1e-4;
  double c2 = 0.9;
  std::size_t max_line_evals = 40;
};

struct BfgsIterate {
  std::size_t iteration = 0;
  double objective = 0.0;
  double step = 0.0;
  double grad_norm = 0.0;
};

struct BfgsResult {
  Vector x;
  double f = 0.0;
  Vector grad;
  std::size_t iterations = 0;
  bool converged = false;
  bool hit_cap = false;
  std::string status;
  std::vector<BfgsIterate> log;  ///< accepted iterates, starting with the initial point
};

/// Dense BFGS with a strong-Wolfe line search. Stops when |grad|_inf <= grad_tol.
BfgsResult minimize_bfgs(const Objective& f, Vector x0, const BfgsOptions& opts = {});

/**
 * BFGS restricted to x >= lower: variables at the bound with a positive
 * gradient are frozen for the step and the trial points are projected, with
 * Armijo backtracking. Stops on the projected-gradient norm.
 */
BfgsResult minimize_bfgs_bounded(const Objective& f, Vector x0, const Vector& lower, const BfgsOptions& opts = {});

}  // namespace lupi

#endif  // LUPI_BFGS_HPP_
