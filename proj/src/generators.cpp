#include "lupi/generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

namespace lupi {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Component {
  double x;
  double y;
  double label;
};

constexpr std::array<Component, 5> kW{{{0.0, 1.0, 1.0}, {0.25, 0.0, -1.0}, {0.5, 1.0, 1.0}, {0.75, 0.0, -1.0}, {1.0, 1.0, 1.0}}};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x2545f4914f6cdd1dULL));
}

GeneratedSample generate_blobs_with_outliers(const BlobConfig& cfg) {
  if (cfg.per_class < 0 || cfg.outliers < 0) throw InvalidInput("blob generator: counts must be nonnegative");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.spread);
  const Eigen::Index n = 2 * cfg.per_class + cfg.outliers;
  if (n == 0) throw InvalidInput("blob generator: empty sample");
  Matrix x(n, 2);
  Vector y(n);
  Matrix priv(n, 1);
  GeneratedSample out;
  out.planted.assign(static_cast<std::size_t>(n), false);
  Eigen::Index row = 0;
  for (Eigen::Index k = 0; k < cfg.per_class; ++k) {
    for (double label : {-1.0, 1.0}) {
      x(row, 0) = label * cfg.center + noise(rng);
      x(row, 1) = noise(rng);
      y[row] = label;
      ++row;
    }
  }
  for (Eigen::Index k = 0; k < cfg.outliers; ++k) {
    const double label = k % 2 == 0 ? 1.0 : -1.0;
    // Beyond the blob of the opposite class.
    x(row, 0) = -label * (cfg.center + cfg.outlier_distance) + noise(rng);
    x(row, 1) = noise(rng);
    y[row] = label;
    out.planted[static_cast<std::size_t>(row)] = true;
    ++row;
  }
  for (Eigen::Index i = 0; i < n; ++i) priv(i, 0) = std::hypot(x(i, 0) - y[i] * cfg.center, x(i, 1));
  out.data = Dataset(std::move(x), std::move(y));
  out.privileged = PrivilegedSet(std::move(priv));
  return out;
}

GeneratedSample generate_blobs_with_outliers(Eigen::Index per_class, Eigen::Index outliers, double distance,
                                             std::uint64_t seed) {
  BlobConfig cfg;
  cfg.per_class = per_class;
  cfg.outliers = outliers;
  cfg.outlier_distance = distance;
  cfg.seed = seed;
  return generate_blobs_with_outliers(cfg);
}

Vector WMixture::exact_eta(const Matrix& x) const {
  if (x.cols() != 2) throw InvalidInput("W mixture: points must be two-dimensional");
  Vector eta(x.rows());
  const double scale = 1.0 / (2.0 * sigma * sigma);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    // Log-sum-exp over components keeps far-away points finite.
    std::array<double, kW.size()> e{};
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < kW.size(); ++k) {
      const double dx = x(i, 0) - kW[k].x;
      const double dy = x(i, 1) - kW[k].y;
      e[k] = -(dx * dx + dy * dy) * scale;
      top = std::max(top, e[k]);
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < kW.size(); ++k) {
      const double w = std::exp(e[k] - top);
      num += kW[k].label * w;
      den += w;
    }
    eta[i] = num / den;
  }
  return eta;
}

GeneratedSample WMixture::sample(Eigen::Index n, std::uint64_t seed) const {
  if (n <= 0) throw InvalidInput("W mixture: sample size must be positive");
  if (!(sigma > 0.0)) throw InvalidInput("W mixture: sigma must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, kW.size() - 1);
  std::normal_distribution<double> noise(0.0, sigma);
  Matrix x(n, 2);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Component& comp = kW[pick(rng)];
    x(i, 0) = comp.x + noise(rng);
    x(i, 1) = comp.y + noise(rng);
    y[i] = comp.label;
  }
  GeneratedSample out;
  out.eta = exact_eta(x);
  out.privileged = PrivilegedSet(Matrix(out.eta));
  out.data = Dataset(std::move(x), std::move(y));
  out.planted.assign(static_cast<std::size_t>(n), false);
  return out;
}

GeneratedSample generate_w_mixture(Eigen::Index n, std::uint64_t seed, double sigma) {
  return WMixture{sigma}.sample(n, seed);
}

}  // namespace lupi
