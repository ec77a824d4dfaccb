#ifndef LUPI_GENERATORS_HPP_
#define LUPI_GENERATORS_HPP_

#include "lupi/dataset.hpp"

#include <cstdint>
#include <vector>

namespace lupi {

/// SplitMix64 mix of a base seed with job coordinates; used for per-job RNG streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

struct GeneratedSample {
  Dataset data;
  PrivilegedSet privileged;
  Vector eta;                ///< exact 2 P(1|x) - 1 when known, else empty
  std::vector<bool> planted; ///< planted wrong-label points
};

/**
 * Two Gaussian blobs centred at (-center, 0) for y = -1 and (center, 0) for
 * y = +1. Outliers alternate labels +1, -1, ... and sit `distance` beyond the
 * opposite blob on the first axis. The privileged feature is the distance to
 * the point's own class centre.
 */
struct BlobConfig {
  Eigen::Index per_class = 50;
  Eigen::Index outliers = 2;
  double outlier_distance = 200.0;
  double center = 2.0;
  double spread = 0.4;
  std::uint64_t seed = 1;
};

GeneratedSample generate_blobs_with_outliers(const BlobConfig& config);
GeneratedSample generate_blobs_with_outliers(Eigen::Index per_class, Eigen::Index outliers, double distance,
                                             std::uint64_t seed);

/**
 * Equal-weight mixture of five isotropic Gaussians whose centres trace a "W":
 * y = +1 at (0,1), (0.5,1), (1,1) and y = -1 at (0.25,0), (0.75,0). Labels are
 * the generating component's label. The privileged feature is the exact eta.
 */
struct WMixture {
  double sigma = 0.3;

  Vector exact_eta(const Matrix& x) const;
  GeneratedSample sample(Eigen::Index n, std::uint64_t seed) const;
};

GeneratedSample generate_w_mixture(Eigen::Index n, std::uint64_t seed, double sigma = 0.3);

}  // namespace lupi

#endif  // LUPI_GENERATORS_HPP_
