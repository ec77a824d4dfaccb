#include "lupi/weighting.hpp"

#include "lupi/smooth_loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

ConfidenceEstimate nadaraya_watson(const Dataset& train, const Matrix& queries, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) throw InvalidInput("Nadaraya-Watson: bandwidth must be positive");
  if (train.size() == 0) throw InvalidInput("Nadaraya-Watson: empty training set");
  if (queries.cols() != train.dim()) throw InvalidInput("Nadaraya-Watson: dimension mismatch");
  ConfidenceEstimate out;
  const Eigen::Index m = queries.rows();
  out.eta = Vector::Zero(m);
  out.underflow.assign(static_cast<std::size_t>(m), false);
  const double scale = 1.0 / (2.0 * bandwidth * bandwidth);
  for (Eigen::Index q = 0; q < m; ++q) {
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index i = 0; i < train.size(); ++i) {
      const double k = std::exp(-(train.x().row(i) - queries.row(q)).squaredNorm() * scale);
      num += k * train.y()[i];
      den += k;
    }
    if (den < std::numeric_limits<double>::min()) {
      out.underflow[static_cast<std::size_t>(q)] = true;
      out.any_underflow = true;
      continue;
    }
    out.eta[q] = std::clamp(num / den, -1.0, 1.0);
  }
  return out;
}

Vector probability_weights(const Vector& eta, const Vector& y, double tau) {
  if (eta.size() != y.size()) throw InvalidInput("probability_weights: length mismatch");
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidInput("probability_weights: tau must be nonnegative");
  Vector c(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double w = 0.5 * (1.0 + y[i] * eta[i]);
    c[i] = tau == 0.0 ? 1.0 : std::pow(std::max(w, 0.0), tau);
  }
  return c;
}

double weighted_risk(const Vector& decision, const Vector& y, const Vector& w, const MarginLoss& loss,
                     RiskNormalization norm) {
  if (decision.size() != y.size() || w.size() != y.size()) throw InvalidInput("weighted_risk: length mismatch");
  if (y.size() == 0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double t = y[i] * decision[i];
    total += w[i] * (loss ? loss(t) : hinge(t));
  }
  if (norm == RiskNormalization::per_instance) return total / static_cast<double>(y.size());
  const double sw = w.sum();
  if (!(sw > 0.0)) throw InvalidInput("weighted_risk: weights sum to zero");
  return total / sw;
}

}  // namespace lupi
