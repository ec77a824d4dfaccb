#ifndef LUPI_WSVM_HPP_
#define LUPI_WSVM_HPP_

#include "lupi/dataset.hpp"
#include "lupi/kernel.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>

namespace lupi {

/// Raised when an iterative solver hits its iteration cap.
class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Closed interval, possibly unbounded on either side.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double width() const { return hi - lo; }
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  /// Midpoint when bounded, the finite end when half-bounded, 0 otherwise.
  double pick() const;
};

struct WsvmOptions {
  double tol = 1e-8;
  std::size_t max_iter = 1'000'000;
  /// Replaces the midpoint offset, e.g. with the offset of an SVM+ model.
  std::optional<double> offset_override;
  /// Feasible starting point for the dual; defaults to zero.
  std::optional<Vector> initial_alpha;
  /// When the pairwise solver has not converged after fallback_after
  /// iterations, restart it from an interior-point solution; max_iter then
  /// caps the restarted run.
  bool interior_fallback = true;
  std::size_t fallback_after = 100'000;
};

/// Result of the dual solve alone (no offset).
struct WsvmDual {
  Vector alpha;
  Vector g;  ///< g_i = sum_j alpha_j y_j K_ij, the decision values without offset
  std::size_t iterations = 0;
  double violation = 0.0;
};

struct WsvmModel {
  KernelSpec kernel;
  Matrix train_x;
  Vector y;
  Vector c;

  Vector alpha;
  Vector beta;
  double b = 0.0;
  Interval b_interval;
  Vector xi;
  Vector h;
  Vector decision;  ///< training decision values as produced by the solver

  double objective_primal = 0.0;
  double objective_dual = 0.0;
  std::size_t iterations = 0;
  double violation = 0.0;

  Vector coefficients() const { return alpha.cwiseProduct(y); }
};

/**
 * SMO solver for
 *
 *   min_a 1/2 a' Y K Y a - 1'a   s.t.  y'a = 0,  0 <= a_i <= c_i.
 *
 * The first index of each pair is the maximal violator; the second is chosen
 * by the second-order gain. Ties resolve to the lowest index. On badly
 * conditioned Gram matrices the pairwise iteration can stall; see
 * WsvmOptions::interior_fallback.
 */
WsvmDual solve_wsvm_dual(const Matrix& K, const Vector& y, const Vector& c, const WsvmOptions& opts = {});

/// Set of offsets minimizing sum_i c_i [1 - y_i (g_i + b)]_+ for fixed g.
Interval offset_interval(const Vector& g, const Vector& y, const Vector& c);

/// Completes a model (offset, slacks, objectives) from a dual solution.
WsvmModel assemble_wsvm(const Matrix& K, const Vector& y, const Vector& c, WsvmDual dual,
                        const WsvmOptions& opts);

WsvmModel solve_wsvm(const Dataset& data, const KernelSpec& spec, const Vector& c, const WsvmOptions& opts = {});

/// Same as solve_wsvm with a precomputed Gram matrix of `data` under `spec`.
WsvmModel solve_wsvm(const Dataset& data, const KernelSpec& spec, const Matrix& K, const Vector& c,
                     const WsvmOptions& opts = {});

Vector predict(const WsvmModel& model, const Matrix& points);

/// sign with ties broken toward +1.
inline double label_of(double f) { return f >= 0.0 ? 1.0 : -1.0; }

/// Fraction of points whose predicted label differs from y.
double error_rate(const Vector& decision, const Vector& y);

}  // namespace lupi

#endif  // LUPI_WSVM_HPP_
