#ifndef LUPI_WEIGHT_LEARNING_HPP_
#define LUPI_WEIGHT_LEARNING_HPP_

#include "lupi/bfgs.hpp"
#include "lupi/dataset.hpp"
#include "lupi/smooth_primal.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace lupi {

/// Sensitivities of the inner solution (alpha*, b*) to the weights c.
struct GradientWorkspace {
  Vector u;        ///< y_i l'(t_i)
  Vector v;        ///< c_i l''(t_i)
  Matrix system;   ///< [I + diag(v) K, v; 1', 0]
  Matrix d_alpha;  ///< column j holds d alpha* / d c_j
  Vector d_b;      ///< d b* / d c_j
  /// No point on the curved part of the loss: d alpha / dc = -diag(u), db/dc = 0.
  bool fallback = false;
};

/// `K` is the regularized Gram matrix the inner model was solved with.
GradientWorkspace implicit_gradient(const PrimalModel& inner, const Matrix& K);

/// Sum of smooth losses of the inner model on validation points; K_cross(i, j) = k(x_i, x'_j).
double validation_loss(const PrimalModel& inner, const Matrix& K_cross, const Vector& y_val);

/// Gradient of validation_loss with respect to c.
Vector validation_gradient(const PrimalModel& inner, const GradientWorkspace& ws, const Matrix& K_cross,
                           const Vector& y_val);

enum class NonnegativityMode { log_weights, projected };

struct WeightLearningConfig {
  std::size_t max_iter = 200;
  double grad_tol = 1e-6;
  std::vector<double> delta_grid{0.01, 0.1, 0.5, 1.0};
  NonnegativityMode mode = NonnegativityMode::log_weights;
  std::optional<Vector> initial;  ///< defaults to all ones
  /// Trial weights above weight_cap * max(1, max initial weight) are rejected,
  /// which keeps single weights from running off toward a hard constraint.
  double weight_cap = 1e6;
  PrimalOptions inner;
};

struct WeightLearningRun {
  double delta = 0.0;
  Vector c;
  PrimalModel model;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double validation_error = 0.0;
  std::size_t iterations = 0;
  std::size_t rejected_steps = 0;
  bool converged = false;
  bool hit_cap = false;
  std::vector<BfgsIterate> log;
};

struct WeightLearningResult {
  Vector c;
  PrimalModel model;
  double delta = 0.0;
  std::size_t best = 0;
  std::vector<WeightLearningRun> runs;
};

WeightLearningRun learn_weights_for_delta(const Dataset& train, const Dataset& validation, const KernelSpec& spec,
                                          double delta, const WeightLearningConfig& config);

/// Runs every delta of the grid and keeps the lowest validation 0/1 error, ties to the smaller delta.
WeightLearningResult learn_weights(const Dataset& train, const Dataset& validation, const KernelSpec& spec,
                                   const WeightLearningConfig& config);

/// CSV with columns delta,iteration,objective,step,grad_norm.
void write_learning_log(std::ostream& out, const WeightLearningResult& result);

}  // namespace lupi

#endif  // LUPI_WEIGHT_LEARNING_HPP_
