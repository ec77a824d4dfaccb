#include "lupi/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lupi {

KernelSpec KernelSpec::rbf(double bandwidth) {
  KernelSpec spec{KernelKind::rbf, bandwidth};
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (kind == KernelKind::rbf && !(bandwidth > 0.0 && std::isfinite(bandwidth))) {
    throw InvalidInput("rbf bandwidth must be positive");
  }
}

std::string KernelSpec::to_string() const {
  if (kind == KernelKind::linear) return "linear";
  std::ostringstream out;
  out.precision(17);
  out << "rbf:" << bandwidth;
  return out.str();
}

KernelSpec KernelSpec::parse(const std::string& text) {
  if (text == "linear") return linear();
  if (text.rfind("rbf:", 0) == 0) {
    std::size_t used = 0;
    const std::string value = text.substr(4);
    double h = 0.0;
    try {
      h = std::stod(value, &used);
    } catch (const std::exception&) {
      throw InvalidInput("cannot parse rbf bandwidth in '" + text + "'");
    }
    if (used != value.size()) throw InvalidInput("trailing characters in kernel spec '" + text + "'");
    return rbf(h);
  }
  throw InvalidInput("unknown kernel spec '" + text + "' (expected linear or rbf:<bandwidth>)");
}

Matrix gram(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  spec.validate();
  if (a.cols() != b.cols()) throw InvalidInput("gram: feature dimensions differ");
  Matrix k(a.rows(), b.rows());
  if (spec.kind == KernelKind::linear) {
    k.noalias() = a * b.transpose();
    return k;
  }
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) k(i, j) = spec(a.row(i), b.row(j));
  }
  return k;
}

Matrix gram(const KernelSpec& spec, const Matrix& a) {
  spec.validate();
  const Eigen::Index n = a.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = spec(a.row(i), a.row(j));
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

std::vector<double> pairwise_distances(const Matrix& a) {
  std::vector<double> d;
  d.reserve(static_cast<std::size_t>(a.rows() * (a.rows() - 1) / 2));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.rows(); ++j) d.push_back((a.row(i) - a.row(j)).norm());
  }
  std::sort(d.begin(), d.end());
  return d;
}

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace lupi
