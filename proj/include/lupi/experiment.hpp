#ifndef LUPI_EXPERIMENT_HPP_
#define LUPI_EXPERIMENT_HPP_

#include "lupi/dataset.hpp"
#include "lupi/generators.hpp"
#include "lupi/kernel.hpp"
#include "lupi/weight_learning.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lupi {

/// fixed_validation draws training subsets from the pool and validates on a
/// separate fixed set; the ratio modes split each subset train:validation.
enum class SplitMode { fixed_validation, one_to_two, two_to_one };

std::string to_string(SplitMode mode);
SplitMode parse_split_mode(const std::string& text);

/// 2^-5, 2^-3, ..., 2^15.
std::vector<double> default_log_grid();

struct HyperGrids {
  std::vector<double> C = default_log_grid();
  std::vector<double> gamma = default_log_grid();
  std::vector<double> tau{0.0, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> quantiles{0.1, 0.5, 0.9};
  /// Explicit RBF bandwidths; when empty they come from distance quantiles of the training split.
  std::vector<double> bandwidths;
  std::vector<double> priv_bandwidths;
};

struct ExperimentConfig {
  std::string source = "wmixture";  ///< wmixture | blobs | files

  std::string train_path;
  std::string test_path;
  std::string validation_path;  ///< fixed validation file; optional
  std::string privileged_path;  ///< aligned with train_path
  std::string scores_path;      ///< eta companion aligned with train_path

  Eigen::Index pool_size = 400;
  Eigen::Index test_size = 1000;
  /// Fixed validation size; 0 means ten times the largest subset.
  Eigen::Index validation_size = 0;
  double w_sigma = 0.3;
  BlobConfig blobs;

  SplitMode split = SplitMode::two_to_one;
  std::vector<Eigen::Index> subset_sizes{30};
  std::size_t repetitions = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"svm"};

  KernelKind kernel = KernelKind::rbf;
  KernelKind priv_kernel = KernelKind::rbf;
  HyperGrids grids;
  std::string eta_source = "nadaraya-watson";  ///< nadaraya-watson | exact | scores
  double nw_bandwidth = 0.0;                    ///< 0: 0.1 quantile of training distances
  bool rescale = true;
  double tol = 1e-8;
  WeightLearningConfig learning;
};

/// Overrides config fields from key=value pairs; unknown keys are rejected.
void apply_key_values(ExperimentConfig& config, const std::map<std::string, std::string>& kv);

struct ResultRow {
  std::string method;
  Eigen::Index subset = 0;
  std::string split;
  double mean_error = 0.0;
  double std = 0.0;
  std::size_t reps = 0;

  bool operator==(const ResultRow&) const = default;
};

using ResultTable = std::vector<ResultRow>;

/// Per (subset, repetition) bookkeeping.
struct JobRecord {
  Eigen::Index subset = 0;
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  std::size_t resamples = 0;
  std::vector<std::size_t> train_ids;
  std::vector<std::size_t> validation_ids;
  std::vector<std::size_t> test_ids;
  std::map<std::string, double> test_error;
  std::map<std::string, std::string> chosen;  ///< selected hyperparameters per method
};

/// WSVM with c = alpha + beta and the SVM+ offset, compared against the SVM+ itself.
struct ReplicationCheck {
  Eigen::Index subset = 0;
  std::size_t rep = 0;
  double agreement = 0.0;  ///< fraction of test points with identical predicted labels
  double rkhs_difference = 0.0;
  double max_decision_difference = 0.0;
};

struct ExperimentResult {
  ResultTable table;
  std::vector<JobRecord> jobs;
  std::vector<ReplicationCheck> replication;
  std::vector<std::string> log;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Header `method,subset,split,mean_error,std,reps`, decimals with 6 significant digits.
void write_results(std::ostream& out, const ResultTable& table);
void emit_results(const ResultTable& table, const std::string& path);
ResultTable parse_results(std::istream& in);

void write_replication(std::ostream& out, const std::vector<ReplicationCheck>& checks);

/// Outcome of the blob experiment: unweighted SVM versus WSVM with zero weight on planted outliers.
struct OutlierTrial {
  std::size_t rep = 0;
  double svm_error = 0.0;
  double wsvm_error = 0.0;
};

struct OutlierStudy {
  BlobConfig blobs;
  double C = 1.0;
  Eigen::Index test_per_class = 500;
  std::size_t repetitions = 50;
  std::uint64_t seed = 1;
};

std::vector<OutlierTrial> run_outlier_study(const OutlierStudy& study);
void write_outlier_trials(std::ostream& out, const std::vector<OutlierTrial>& trials);

}  // namespace lupi

#endif  // LUPI_EXPERIMENT_HPP_
