#include "lupi/dataset.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace lupi {

namespace {

void require_finite(const Matrix& x, const char* what) {
  if (!x.allFinite()) {
    throw InvalidInput(std::string(what) + " contains non-finite values");
  }
}

std::vector<std::size_t> default_ids(Eigen::Index n) {
  std::vector<std::size_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  return ids;
}

}  // namespace

Dataset::Dataset(Matrix x, Vector y) : Dataset(x, y, default_ids(x.rows())) {}

Dataset::Dataset(Matrix x, Vector y, std::vector<std::size_t> ids)
    : x_(std::move(x)), y_(std::move(y)), ids_(std::move(ids)) {
  if (x_.rows() < 1) throw InvalidInput("dataset must contain at least one instance");
  if (y_.size() != x_.rows()) throw InvalidInput("label count does not match instance count");
  if (static_cast<Eigen::Index>(ids_.size()) != x_.rows()) {
    throw InvalidInput("id count does not match instance count");
  }
  for (Eigen::Index i = 0; i < y_.size(); ++i) {
    if (y_[i] != 1.0 && y_[i] != -1.0) {
      throw InvalidInput("label at row " + std::to_string(i) + " is not -1 or +1");
    }
  }
  require_finite(x_, "dataset");
}

Eigen::Index Dataset::count(double label) const {
  return static_cast<Eigen::Index>((y_.array() == label).count());
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  Vector y(static_cast<Eigen::Index>(rows.size()));
  std::vector<std::size_t> ids;
  ids.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = rows[k];
    if (r < 0 || r >= x_.rows()) throw InvalidInput("subset row out of range");
    x.row(static_cast<Eigen::Index>(k)) = x_.row(r);
    y[static_cast<Eigen::Index>(k)] = y_[r];
    ids.push_back(ids_[static_cast<std::size_t>(r)]);
  }
  return Dataset(std::move(x), std::move(y), std::move(ids));
}

Dataset Dataset::with_features(Matrix x) const {
  if (x.rows() != x_.rows()) throw InvalidInput("replacement features have the wrong row count");
  return Dataset(std::move(x), y_, ids_);
}

PrivilegedSet::PrivilegedSet(Matrix x) : x_(std::move(x)) {
  if (x_.rows() < 1) throw InvalidInput("privileged set must contain at least one instance");
  require_finite(x_, "privileged set");
}

PrivilegedSet PrivilegedSet::subset(const std::vector<Eigen::Index>& rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), x_.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= x_.rows()) throw InvalidInput("subset row out of range");
    x.row(static_cast<Eigen::Index>(k)) = x_.row(rows[k]);
  }
  return PrivilegedSet(std::move(x));
}

void require_aligned(const Dataset& data, const PrivilegedSet& priv) {
  if (priv.size() != data.size()) {
    throw InvalidInput("privileged set has " + std::to_string(priv.size()) + " rows, dataset has " +
                       std::to_string(data.size()));
  }
}

Matrix FeatureMap::apply(const Matrix& x) const {
  if (x.cols() != lo.size()) throw InvalidInput("feature map dimension mismatch");
  Matrix out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    out.col(j) = (x.col(j).array() - lo[j]) * inv_range[j];
  }
  return out;
}

Dataset FeatureMap::apply(const Dataset& data) const { return data.with_features(apply(data.x())); }

std::pair<Dataset, FeatureMap> rescale_features(const Dataset& data) {
  const Matrix& x = data.x();
  FeatureMap map;
  map.lo = x.colwise().minCoeff().transpose();
  const Vector hi = x.colwise().maxCoeff().transpose();
  map.inv_range.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double range = hi[j] - map.lo[j];
    map.inv_range[j] = range > 0.0 ? 1.0 / range : 0.0;
  }
  return {map.apply(data), map};
}

}  // namespace lupi
