#ifndef LUPI_SMOOTH_PRIMAL_HPP_
#define LUPI_SMOOTH_PRIMAL_HPP_

#include "lupi/dataset.hpp"
#include "lupi/kernel.hpp"
#include "lupi/smooth_loss.hpp"

#include <cstddef>
#include <optional>

namespace lupi {

struct PrimalOptions {
  /// Stationarity tolerance; entry i of the residual is scaled by 1 / max(1, c_i).
  double tol = 1e-10;
  std::size_t max_iter = 500;
  /// Diagonal shift as a multiple of trace(K) / n.
  double jitter = 1e-10;
  std::optional<Vector> initial_alpha;
  std::optional<double> initial_b;
};

struct PrimalModel {
  KernelSpec kernel;
  Matrix train_x;
  Vector y;
  Vector c;
  double delta = 0.5;

  Vector alpha;
  double b = 0.0;
  Vector margins;  ///< y_i (K_i' alpha + b)
  double objective = 0.0;
  /// Scaled stationarity residual max(max_i |alpha_i + u_i c_i| / max(1, c_i), |u'c| / max(1, |c|_1)).
  double gradient_norm = 0.0;
  std::size_t iterations = 0;
};

/// K + jitter * trace(K) / n * I.
Matrix regularized_gram(const Matrix& K, double jitter = 1e-10);

/**
 * Damped Newton method for
 *
 *   min_{alpha,b} 1/2 alpha'K alpha + sum_i c_i l(y_i (K_i'alpha + b)).
 *
 * `K` must already be regularized. When no point lies on the curved part of the
 * loss the offset moves until the nearest weighted point reaches the middle of
 * the curved band, and it stays put once its gradient vanishes.
 */
PrimalModel solve_primal(const Matrix& K, const Vector& y, const Vector& c, double delta,
                         const PrimalOptions& opts = {});

PrimalModel solve_primal(const Dataset& data, const KernelSpec& spec, const Vector& c, double delta,
                         const PrimalOptions& opts = {});

double primal_objective(const Matrix& K, const Vector& y, const Vector& c, double delta, const Vector& alpha,
                        double b);

/// Gradient (K (alpha + diag(u) c), u'c) with u_i = y_i l'(t_i).
Vector primal_gradient(const Matrix& K, const Vector& y, const Vector& c, double delta, const Vector& alpha, double b);

Vector predict(const PrimalModel& model, const Matrix& points);

}  // namespace lupi

#endif  // LUPI_SMOOTH_PRIMAL_HPP_
