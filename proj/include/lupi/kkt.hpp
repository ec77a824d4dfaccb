#ifndef LUPI_KKT_HPP_
#define LUPI_KKT_HPP_

#include "lupi/svmplus.hpp"
#include "lupi/wsvm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lupi {

enum class KktGroup { stationarity, primal_feasibility, dual_feasibility, complementarity };

std::string to_string(KktGroup group);

struct KktResidual {
  std::string name;
  KktGroup group;
  double value;
};

/**
 * Optimality certificate. Complementarity products are scaled by
 * 1 / max(1, upper bound) so the tolerance is independent of the weight scale.
 */
struct KktReport {
  std::vector<KktResidual> residuals;
  double stationarity = 0.0;
  double primal_feasibility = 0.0;
  double dual_feasibility = 0.0;
  double complementarity = 0.0;
  double max_violation = 0.0;
  /// |primal - dual| / (1 + |primal|) from independently recomputed objectives.
  double gap = 0.0;
  double primal = 0.0;
  double dual = 0.0;
  double tol = 0.0;
  bool pass = true;

  double residual(const std::string& name) const;
  /// Flat key=value block, one entry per line.
  std::string to_text() const;
};

KktReport check_wsvm_kkt(const WsvmModel& model, const Matrix& K, double tol);
KktReport check_wsvm_kkt(const WsvmModel& model, double tol);

KktReport check_svmplus_kkt(const SvmPlusModel& model, const Matrix& K, const Matrix& Kt, double tol);
KktReport check_svmplus_kkt(const SvmPlusModel& model, double tol);

struct IndexSets {
  std::vector<Eigen::Index> plus;
  std::vector<Eigen::Index> minus;
  std::vector<Eigen::Index> below;     ///< y_i f(x_i) < 1
  std::vector<Eigen::Index> at_most;   ///< y_i f(x_i) <= 1
};

/// Margin classes with y_i f(x_i) compared against 1 at absolute tolerance `tol`.
IndexSets index_sets(const Vector& decision, const Vector& y, double tol);

struct OffsetUniqueness {
  bool unique = true;
  /// Sum of weights over negatives strictly inside the margin vs positives on or inside it.
  bool negative_balance = false;
  /// Sum over positives strictly inside vs negatives on or inside.
  bool positive_balance = false;
  double minus_below = 0.0;
  double plus_at_most = 0.0;
  double plus_below = 0.0;
  double minus_at_most = 0.0;
  bool no_support_vectors = false;
  Interval interval;

  std::string to_text() const;
};

OffsetUniqueness b_uniqueness(const WsvmModel& model, double tol = 1e-8);

/// True iff [YKY; 1'; y'] has numerical rank n at relative threshold `tol`.
bool dual_uniqueness_condition(const Matrix& K, const Vector& y, double tol = 1e-10);

/// Unit vector d with YKYd = 0, 1'd = 0 and y'd = 0 when the condition above
/// fails; adding a multiple of d to an optimal dual keeps the primal solution.
std::optional<Vector> dual_null_direction(const Matrix& K, const Vector& y, double tol = 1e-10);

}  // namespace lupi

#endif  // LUPI_KKT_HPP_
