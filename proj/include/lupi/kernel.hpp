#ifndef LUPI_KERNEL_HPP_
#define LUPI_KERNEL_HPP_

#include "lupi/dataset.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace lupi {

enum class KernelKind { linear, rbf };

/**
 * Kernel function. The Gaussian RBF is parametrized by a bandwidth h as
 *
 *   k(x, x') = exp(-||x - x'||^2 / (2 h^2)),
 *
 * and the same convention is used by configuration files and the CLI.
 */
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double bandwidth = 1.0;

  static KernelSpec linear() { return {KernelKind::linear, 1.0}; }
  static KernelSpec rbf(double bandwidth);

  void validate() const;

  template <typename A, typename B>
  double operator()(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) const {
    if (kind == KernelKind::linear) return a.dot(b);
    return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth * bandwidth));
  }

  std::string to_string() const;
  static KernelSpec parse(const std::string& text);

  bool operator==(const KernelSpec&) const = default;
};

/// Rectangular block with entry (i, j) = k(a_i, b_j).
Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b);

/// Symmetric Gram matrix of a single point set; the upper triangle is mirrored
/// so the result is exactly symmetric.
Matrix gram(const KernelSpec& spec, const Matrix& a);

/// Pairwise Euclidean distances between distinct rows, sorted ascending.
std::vector<double> pairwise_distances(const Matrix& a);

/// Linear-interpolated quantile of a sorted sample.
double quantile(const std::vector<double>& sorted, double q);

}  // namespace lupi

#endif  // LUPI_KERNEL_HPP_
