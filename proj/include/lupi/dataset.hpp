#ifndef LUPI_DATASET_HPP_
#define LUPI_DATASET_HPP_

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lupi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Raised when an input violates a documented precondition.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/**
 * Labeled sample. Rows of `x` are instances, `y` holds labels in {-1,+1} and
 * `ids` are stable indices used to track instances through subsampling.
 */
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix x, Vector y);
  Dataset(Matrix x, Vector y, std::vector<std::size_t> ids);

  const Matrix& x() const { return x_; }
  const Vector& y() const { return y_; }
  const std::vector<std::size_t>& ids() const { return ids_; }

  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

  Eigen::Index count(double label) const;
  bool has_both_classes() const { return count(1.0) > 0 && count(-1.0) > 0; }

  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  Dataset with_features(Matrix x) const;

 private:
  Matrix x_;
  Vector y_;
  std::vector<std::size_t> ids_;
};

/// Training-only features aligned row-by-row with a Dataset.
class PrivilegedSet {
 public:
  PrivilegedSet() = default;
  explicit PrivilegedSet(Matrix x);

  const Matrix& x() const { return x_; }
  Eigen::Index size() const { return x_.rows(); }
  Eigen::Index dim() const { return x_.cols(); }

  PrivilegedSet subset(const std::vector<Eigen::Index>& rows) const;

 private:
  Matrix x_;
};

void require_aligned(const Dataset& data, const PrivilegedSet& priv);

/// Per-column affine map `(v - lo) * inv_range`; constant columns map to 0.
struct FeatureMap {
  Vector lo;
  Vector inv_range;

  Matrix apply(const Matrix& x) const;
  Dataset apply(const Dataset& data) const;
};

/// Min-max rescaling of every column to [0,1]. The returned map is meant to be
/// reused on validation and test data.
std::pair<Dataset, FeatureMap> rescale_features(const Dataset& data);

}  // namespace lupi

#endif  // LUPI_DATASET_HPP_
