#ifndef LUPI_DATA_IO_HPP_
#define LUPI_DATA_IO_HPP_

#include "lupi/dataset.hpp"

#include <iosfwd>
#include <string>

namespace lupi {

/// Parse the sparse text format `label index:value ...` (1-based indices).
/// `min_dim` pads the feature dimension, e.g. to match a training file.
Dataset read_sparse(std::istream& in, Eigen::Index min_dim = 0);
Dataset read_sparse_file(const std::string& path, Eigen::Index min_dim = 0);

void write_sparse(std::ostream& out, const Dataset& data);
void write_sparse_file(const std::string& path, const Dataset& data);

/// Privileged companion: same sparse format, aligned by line with the data file.
/// The label column must be present and must agree with the data labels.
PrivilegedSet read_privileged_file(const std::string& path, const Dataset& data);

/// One nonnegative decimal per line.
Vector read_weights(std::istream& in);
Vector read_weights_file(const std::string& path);
void write_weights(std::ostream& out, const Vector& c);
void write_weights_file(const std::string& path, const Vector& c);

/// One confidence score in [-1,1] per line.
Vector read_scores(std::istream& in);
Vector read_scores_file(const std::string& path);
void write_scores_file(const std::string& path, const Vector& eta);

/// Arithmetic mean of several aligned score files (annotator averaging).
Vector average_score_files(const std::vector<std::string>& paths);

}  // namespace lupi

#endif  // LUPI_DATA_IO_HPP_
