#ifndef LUPI_SVMPLUS_HPP_
#define LUPI_SVMPLUS_HPP_

#include "lupi/dataset.hpp"
#include "lupi/kernel.hpp"
#include "lupi/wsvm.hpp"

#include <cstddef>
#include <optional>
#include <string>

namespace lupi {

struct SvmPlusOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1'000'000;
  /// Relative eigenvalue threshold deciding whether the privileged Gram matrix has full rank.
  double rank_tol = 1e-10;
  /// Pairwise iterations before restarting from an interior-point solution.
  std::size_t fallback_after = 100'000;
};

/// How a model was obtained.
enum class SvmPlusPath {
  smo,                ///< gamma > 0, pairwise solver
  reduced_full_rank,  ///< gamma = 0 with a full-rank privileged Gram matrix: plain soft-margin SVM
  reduced_constrained ///< gamma = 0 otherwise: slacks restricted to the correcting span
};

std::string to_string(SvmPlusPath path);

struct SvmPlusModel {
  KernelSpec kernel;
  KernelSpec priv_kernel;
  Matrix train_x;
  Matrix priv_x;
  Vector y;
  double C = 1.0;
  double gamma = 1.0;

  Vector alpha;
  Vector beta;
  Vector alpha_tilde;  ///< alpha + beta - C
  double b = 0.0;
  Interval b_interval;  ///< a single point whenever a support vector exists
  double b_tilde = 0.0;
  /// Explicit correcting weight vector, available for a linear privileged kernel.
  std::optional<Vector> w_tilde;

  Vector xi;        ///< correcting values on the training points
  Vector h;         ///< hinge losses of the decision function
  Vector decision;  ///< training decision values

  double objective_primal = 0.0;
  double objective_dual = 0.0;
  std::size_t iterations = 0;
  double violation = 0.0;
  SvmPlusPath path = SvmPlusPath::smo;

  Vector coefficients() const { return alpha.cwiseProduct(y); }
};

/**
 * Solves
 *
 *   min_{a,b} 1/2 a'YKYa - 1'a + 1/(2 gamma) t'Kt t,   t = a + b - C 1,
 *   s.t. y'a = 0, 1't = 0, a >= 0, b >= 0.
 *
 * Pairs are drawn from three variable groups (alpha of each class and beta),
 * so both equality constraints hold exactly after every update.
 */
SvmPlusModel solve_svmplus(const Dataset& data, const PrivilegedSet& priv, const KernelSpec& spec,
                           const KernelSpec& priv_spec, double C, double gamma, const SvmPlusOptions& opts = {});

/// Same with precomputed Gram matrices of the decision and correcting spaces.
SvmPlusModel solve_svmplus(const Dataset& data, const PrivilegedSet& priv, const KernelSpec& spec,
                           const KernelSpec& priv_spec, const Matrix& K, const Matrix& Kt, double C, double gamma,
                           const SvmPlusOptions& opts = {});

/// Correcting function (1/gamma) sum_j t_j k~(x~_j, .) + b~ at new privileged points.
Vector correcting_values(const SvmPlusModel& model, const Matrix& priv_points);

Vector predict(const SvmPlusModel& model, const Matrix& points);

/// Dual objective in minimization form, for reference solvers.
double svmplus_dual_objective(const Matrix& K, const Matrix& Kt, const Vector& y, double C, double gamma,
                              const Vector& alpha, const Vector& beta);

}  // namespace lupi

#endif  // LUPI_SVMPLUS_HPP_
