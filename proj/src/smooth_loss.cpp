#include "lupi/smooth_loss.hpp"

#include "lupi/dataset.hpp"

namespace lupi {

void SmoothLossSpec::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw InvalidInput("smoothing width must lie in (0, 1]");
}

LossValue smooth_hinge(double t, double delta) {
  const double u = 1.0 - t;
  if (u <= 0.0) return {};
  if (u >= 2.0 * delta) return {u - delta, -1.0, 0.0};
  const double d3 = 16.0 * delta * delta * delta;
  return {(4.0 * delta - u) * u * u * u / d3, -(12.0 * delta - 4.0 * u) * u * u / d3, (24.0 * delta - 12.0 * u) * u / d3};
}

}  // namespace lupi
