#ifndef LUPI_WEIGHTING_HPP_
#define LUPI_WEIGHTING_HPP_

#include "lupi/dataset.hpp"

#include <functional>
#include <vector>

namespace lupi {

struct ConfidenceEstimate {
  Vector eta;                  ///< estimates of 2 P(1|x) - 1, in [-1, 1]
  std::vector<bool> underflow; ///< all kernel weights underflowed; eta set to 0
  bool any_underflow = false;
};

/// Kernel-smoothed label average with K_h(d) = exp(-d^2 / (2 h^2)).
ConfidenceEstimate nadaraya_watson(const Dataset& train, const Matrix& queries, double bandwidth);

/// c_i = ((1 + y_i eta_i) / 2)^tau; tau = 0 gives exactly 1.
Vector probability_weights(const Vector& eta, const Vector& y, double tau);

enum class RiskNormalization {
  per_instance,  ///< (1/n) sum_i w_i l_i
  weight_sum     ///< sum_i w_i l_i / sum_i w_i
};

using MarginLoss = std::function<double(double)>;

/// Weighted empirical risk of decision values under a margin loss (hinge by default).
double weighted_risk(const Vector& decision, const Vector& y, const Vector& w, const MarginLoss& loss = {},
                     RiskNormalization norm = RiskNormalization::per_instance);

}  // namespace lupi

#endif  // LUPI_WEIGHTING_HPP_
