#ifndef LUPI_SMOOTH_LOSS_HPP_
#define LUPI_SMOOTH_LOSS_HPP_

namespace lupi {

/// Smoothing width of the hinge surrogate; 0 < delta <= 1.
struct SmoothLossSpec {
  double delta = 0.5;

  void validate() const;
};

struct LossValue {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/**
 * Twice continuously differentiable hinge surrogate:
 *
 *   1 - t - delta                           t <= 1 - 2 delta
 *   (1 - t)^3 (t - 1 + 4 delta) / (16 delta^3)   1 - 2 delta < t < 1
 *   0                                       t >= 1
 *
 * with its first and second derivatives in t.
 */
LossValue smooth_hinge(double t, double delta);

inline double hinge(double t) { return t < 1.0 ? 1.0 - t : 0.0; }

}  // namespace lupi

#endif  // LUPI_SMOOTH_LOSS_HPP_
