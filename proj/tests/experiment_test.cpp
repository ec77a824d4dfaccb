#include "lupi/data_io.hpp"
#include "lupi/experiment.hpp"
#include "lupi/generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

namespace lupi {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.pool_size = 80;
  cfg.test_size = 200;
  cfg.subset_sizes = {24};
  cfg.repetitions = 2;
  cfg.methods = {"svm", "wsvm-prob", "svmplus", "wsvm-from-svmplus"};
  cfg.grids.C = {0.25, 4.0};
  cfg.grids.gamma = {0.5, 8.0};
  cfg.grids.tau = {0.0, 1.0};
  cfg.grids.quantiles = {0.5};
  cfg.eta_source = "exact";
  return cfg;
}

TEST(Grids, DefaultLogGrid) {
  const std::vector<double> g = default_log_grid();
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 1.0 / 32.0);
  EXPECT_EQ(g.back(), 32768.0);
  for (std::size_t k = 1; k < g.size(); ++k) EXPECT_EQ(g[k], 4.0 * g[k - 1]);
  const HyperGrids h;
  EXPECT_EQ(h.tau, (std::vector<double>{0.0, 0.5, 1.0, 2.0, 4.0}));
}

TEST(Config, SplitModes) {
  for (const SplitMode m : {SplitMode::fixed_validation, SplitMode::one_to_two, SplitMode::two_to_one}) {
    EXPECT_EQ(parse_split_mode(to_string(m)), m);
  }
  EXPECT_THROW(parse_split_mode("3-to-1"), InvalidInput);
}

TEST(Config, KeyValuesOverrideFields) {
  ExperimentConfig cfg;
  apply_key_values(cfg, {{"subsets", "10,20"},
                         {"methods", "svm,svmplus"},
                         {"split", "1-to-2"},
                         {"grid_C", "1,2"},
                         {"seed", "9"},
                         {"rescale", "false"},
                         {"learn_mode", "projected"}});
  EXPECT_EQ(cfg.subset_sizes, (std::vector<Eigen::Index>{10, 20}));
  EXPECT_EQ(cfg.methods, (std::vector<std::string>{"svm", "svmplus"}));
  EXPECT_EQ(cfg.split, SplitMode::one_to_two);
  EXPECT_EQ(cfg.grids.C, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_FALSE(cfg.rescale);
  EXPECT_EQ(cfg.learning.mode, NonnegativityMode::projected);
  EXPECT_THROW(apply_key_values(cfg, {{"no_such_key", "1"}}), InvalidInput);
  EXPECT_THROW(apply_key_values(cfg, {{"rescale", "maybe"}}), InvalidInput);
  EXPECT_THROW(apply_key_values(cfg, {{"kernel", "poly"}}), InvalidInput);
}

TEST(Experiment, RejectsBadConfigurations) {
  ExperimentConfig cfg = small_config();
  cfg.methods = {"boosting"};
  EXPECT_THROW(run_experiment(cfg), InvalidInput);
  cfg = small_config();
  cfg.subset_sizes = {500};
  EXPECT_THROW(run_experiment(cfg), InvalidInput);
  cfg = small_config();
  cfg.repetitions = 0;
  EXPECT_THROW(run_experiment(cfg), InvalidInput);
}

TEST(Experiment, DeterministicAndWellFormed) {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult a = run_experiment(cfg);
  const ExperimentResult b = run_experiment(cfg);
  EXPECT_EQ(a.table, b.table);
  ASSERT_EQ(a.table.size(), cfg.methods.size());
  ASSERT_EQ(a.jobs.size(), 2u);
  for (std::size_t k = 0; k < a.jobs.size(); ++k) {
    EXPECT_EQ(a.jobs[k].train_ids, b.jobs[k].train_ids);
    EXPECT_EQ(a.jobs[k].test_error, b.jobs[k].test_error);
    // 2-to-1 split of 24 points, disjoint from validation.
    EXPECT_EQ(a.jobs[k].train_ids.size(), 16u);
    EXPECT_EQ(a.jobs[k].validation_ids.size(), 8u);
    std::set<std::size_t> seen(a.jobs[k].train_ids.begin(), a.jobs[k].train_ids.end());
    for (const std::size_t id : a.jobs[k].validation_ids) EXPECT_EQ(seen.count(id), 0u);
  }
  EXPECT_NE(a.jobs[0].seed, a.jobs[1].seed);
  for (const ResultRow& r : a.table) {
    EXPECT_EQ(r.reps, 2u);
    EXPECT_EQ(r.split, "2-to-1");
    EXPECT_GE(r.mean_error, 0.0);
    EXPECT_LE(r.mean_error, 1.0);
  }
  // The weighted SVM built from the SVM+ duals reproduces it.
  ASSERT_EQ(a.replication.size(), 2u);
  for (const ReplicationCheck& c : a.replication) EXPECT_GE(c.agreement, 0.99);
}

TEST(Experiment, SeedChangesTheDraw) {
  ExperimentConfig cfg = small_config();
  cfg.methods = {"svm"};
  cfg.repetitions = 1;
  const ExperimentResult a = run_experiment(cfg);
  cfg.seed = 2;
  const ExperimentResult b = run_experiment(cfg);
  EXPECT_NE(a.jobs[0].train_ids, b.jobs[0].train_ids);
}

TEST(Experiment, FixedValidationAndFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "lupi_experiment_test";
  std::filesystem::create_directories(dir);
  const GeneratedSample train = generate_w_mixture(60, 5);
  const GeneratedSample test = generate_w_mixture(100, 6);
  const GeneratedSample val = generate_w_mixture(40, 7);
  write_sparse_file((dir / "train.txt").string(), train.data);
  write_sparse_file((dir / "test.txt").string(), test.data);
  write_sparse_file((dir / "val.txt").string(), val.data);
  write_scores_file((dir / "scores.txt").string(), train.eta);
  ExperimentConfig cfg = small_config();
  apply_key_values(cfg, {{"source", "files"},
                         {"train", (dir / "train.txt").string()},
                         {"test", (dir / "test.txt").string()},
                         {"validation", (dir / "val.txt").string()},
                         {"scores", (dir / "scores.txt").string()},
                         {"eta_source", "scores"},
                         {"split", "fixed"},
                         {"methods", "svm,wsvm-prob"}});
  const ExperimentResult r = run_experiment(cfg);
  ASSERT_EQ(r.table.size(), 2u);
  EXPECT_EQ(r.jobs[0].train_ids.size(), 24u);
  EXPECT_EQ(r.jobs[0].validation_ids.size(), 40u);
  EXPECT_EQ(r.jobs[0].test_ids.size(), 100u);
  std::filesystem::remove_all(dir);
}

TEST(Results, CsvFormatAndRoundTrip) {
  const ResultTable table{{"svm", 30, "2-to-1", 0.052225, 1.0 / 3.0, 20}, {"wsvm-learned", 30, "2-to-1", 0.0455, 0.0, 20}};
  std::stringstream s;
  write_results(s, table);
  EXPECT_EQ(s.str(),
            "method,subset,split,mean_error,std,reps\n"
            "svm,30,2-to-1,0.052225,0.333333,20\n"
            "wsvm-learned,30,2-to-1,0.0455,0,20\n");
  const ResultTable back = parse_results(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].method, "svm");
  EXPECT_EQ(back[0].std, 0.333333);
  EXPECT_EQ(back[1].reps, 20u);
}

TEST(Results, HeaderOnlyAndMalformedFiles) {
  std::istringstream header_only("method,subset,split,mean_error,std,reps\n");
  EXPECT_TRUE(parse_results(header_only).empty());
  std::istringstream one_row("method,subset,split,mean_error,std,reps\nsvm,10,fixed,0.5,0.1,3\n");
  EXPECT_EQ(parse_results(one_row).size(), 1u);
  std::istringstream wrong_header("a,b\n");
  EXPECT_THROW(parse_results(wrong_header), InvalidInput);
  std::istringstream short_row("method,subset,split,mean_error,std,reps\nsvm,10\n");
  EXPECT_THROW(parse_results(short_row), InvalidInput);
}

TEST(Generators, BlobsLayout) {
  BlobConfig cfg;
  cfg.per_class = 10;
  cfg.outliers = 2;
  const GeneratedSample s = generate_blobs_with_outliers(cfg);
  ASSERT_EQ(s.data.size(), 22);
  EXPECT_EQ(s.data.count(1.0), 11);
  EXPECT_EQ(s.data.count(-1.0), 11);
  for (Eigen::Index i = 0; i < 22; ++i) {
    const bool planted = s.planted[static_cast<std::size_t>(i)];
    EXPECT_EQ(planted, i >= 20);
    const double side = s.data.x()(i, 0) * s.data.y()[i];
    if (planted) {
      EXPECT_LT(side, -150.0);
    } else {
      EXPECT_GT(side, 0.0);
    }
    EXPECT_NEAR(s.privileged.x()(i, 0),
                std::hypot(s.data.x()(i, 0) - s.data.y()[i] * cfg.center, s.data.x()(i, 1)), 1e-12);
  }
  const GeneratedSample again = generate_blobs_with_outliers(cfg);
  EXPECT_EQ(again.data.x(), s.data.x());
}

TEST(Generators, WMixture) {
  const WMixture w;
  Matrix centres(5, 2);
  centres << 0, 1, 0.5, 1, 1, 1, 0.25, 0, 0.75, 0;
  const Vector eta = w.exact_eta(centres);
  for (Eigen::Index k = 0; k < 3; ++k) EXPECT_GT(eta[k], 0.0);
  for (Eigen::Index k = 3; k < 5; ++k) EXPECT_LT(eta[k], 0.0);
  Matrix far(1, 2);
  far << 1e4, -1e4;
  EXPECT_TRUE(std::isfinite(w.exact_eta(far)[0]));
  const GeneratedSample s = generate_w_mixture(500, 3);
  EXPECT_EQ(s.data.size(), 500);
  EXPECT_LE(s.eta.cwiseAbs().maxCoeff(), 1.0);
  EXPECT_EQ(s.privileged.x().col(0), s.eta);
  const double plus = static_cast<double>(s.data.count(1.0)) / 500.0;
  EXPECT_NEAR(plus, 0.6, 0.07);
}

TEST(Generators, DerivedSeedsDiffer) {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t a = 0; a < 20; ++a) {
    for (std::uint64_t b = 0; b < 20; ++b) seeds.insert(derive_seed(1, a, b));
  }
  EXPECT_EQ(seeds.size(), 400u);
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(2, 2, 3));
}

TEST(OutlierStudy, ZeroWeightOnOutliersHelps) {
  OutlierStudy study;
  study.repetitions = 3;
  study.test_per_class = 100;
  const std::vector<OutlierTrial> trials = run_outlier_study(study);
  ASSERT_EQ(trials.size(), 3u);
  for (const OutlierTrial& t : trials) EXPECT_LE(t.wsvm_error, t.svm_error);
  std::ostringstream out;
  write_outlier_trials(out, trials);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "rep,svm_error,wsvm_error");
}

}  // namespace
}  // namespace lupi
