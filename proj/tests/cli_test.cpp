#include "cli.hpp"

#include "lupi/data_io.hpp"
#include "lupi/experiment.hpp"
#include "lupi/serialize.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace lupi {
namespace {

namespace fs = std::filesystem;

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("lupi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("data.txt", "+1 1:1\n-1 1:2\n+1 1:3\n");
    write("weights.txt", "4\n6\n2\n");
    write("priv.txt", "+1 1:0.5\n-1 1:0.1\n+1 1:2\n");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream out(path(name));
    out << text;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, Counterexample) {
  const CliRun r = run({"counterexample"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "quantity,value,expected,ok");
  EXPECT_EQ(r.out.find(",false"), std::string::npos);
  EXPECT_NE(r.out.find("rho_normalized,"), std::string::npos);
}

TEST_F(CliTest, TrainWsvm) {
  const CliRun r = run({"train-wsvm", "--data", path("data.txt"), "--weights", path("weights.txt"), "--model-out",
                     path("model.txt"), "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "index,label,weight,alpha,beta,xi,h,decision");
  EXPECT_NE(r.err.find("pass=true"), std::string::npos);
  std::ifstream model(path("model.txt"));
  const WsvmModel m = read_wsvm_model(model);
  EXPECT_NEAR(m.b, 3.0, 1e-6);
}

TEST_F(CliTest, TrainSvmPlus) {
  const CliRun r = run({"train-svmplus", "--data", path("data.txt"), "--privileged", path("priv.txt"), "--C", "2",
                     "--gamma", "1", "--weights-out", path("c.txt"), "--check"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "index,label,alpha,beta,alpha_tilde,xi,h,decision");
  std::ifstream w(path("c.txt"));
  EXPECT_NEAR(read_weights(w).sum(), 6.0, 1e-8);
}

TEST_F(CliTest, EquivReportsNonRepresentable) {
  const CliRun r = run({"equiv", "--data", path("data.txt"), "--weights", path("weights.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("representable=false"), std::string::npos);
  const CliRun c = run({"equiv", "--data", path("data.txt"), "--weights", path("weights.txt"), "--construct",
                     path("features.txt")});
  EXPECT_EQ(c.code, 1);
  EXPECT_FALSE(fs::exists(path("features.txt")));
}

TEST_F(CliTest, EquivConstructWritesFeatures) {
  const CliRun r = run({"equiv", "--data", path("data.txt"), "--construct", path("features.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("representable=true"), std::string::npos);
  std::ifstream in(path("features.txt"));
  EXPECT_EQ(read_sparse(in).size(), 3);
}

TEST_F(CliTest, ConfigFileAndPrecedence) {
  write("run.cfg", "# settings\ndata=" + path("data.txt") + "\nweights=" + path("weights.txt") + "\noffset=7\n");
  const CliRun r = run({"train-wsvm", "--config", path("run.cfg")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("b=7\n"), std::string::npos) << r.err;
  const CliRun o = run({"train-wsvm", "--config", path("run.cfg"), "--offset", "5"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.err.find("b=5\n"), std::string::npos) << o.err;
  write("bad.cfg", "unknown_key=1\n");
  EXPECT_EQ(run({"train-wsvm", "--config", path("bad.cfg"), "--data", path("data.txt")}).code, 2);
}

TEST_F(CliTest, ExperimentWritesResults) {
  write("exp.cfg", "pool_size=60\ntest_size=100\nsubsets=20\nmethods=svm\ngrid_C=1\nquantiles=0.5\n");
  const CliRun r = run({"experiment", "--config", path("exp.cfg"), "--set", "repetitions=2", "--out", path("res.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("res.csv"));
  const ResultTable t = parse_results(in);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].reps, 2u);
  EXPECT_EQ(run({"experiment", "--set", "bogus=1"}).code, 1);
}

TEST_F(CliTest, LearnWeights) {
  write("train.txt", "+1 1:0 2:1\n-1 1:1 2:0\n+1 1:0.1 2:0.9\n-1 1:0.9 2:0.2\n-1 1:0.1 2:1\n");
  write("val.txt", "+1 1:0.05 2:0.95\n-1 1:0.95 2:0.1\n");
  const CliRun r = run({"learn-weights", "--train", path("train.txt"), "--validation", path("val.txt"), "--delta",
                     "0.5,1", "--max-iter", "5", "--weights-out", path("learned.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "delta,iteration,objective,step,grad_norm");
  std::ifstream in(path("learned.txt"));
  EXPECT_EQ(read_weights(in).size(), 5);
  EXPECT_EQ(run({"learn-weights", "--train", path("train.txt"), "--validation", path("val.txt"), "--mode", "x"}).code,
            1);
}

TEST_F(CliTest, Figure3AndWshapeSmall) {
  const CliRun f = run({"figure3", "--reps", "3", "--test-per-class", "50", "--check"});
  EXPECT_EQ(f.code, 0) << f.err;
  EXPECT_EQ(first_line(f.out), "rep,svm_error,wsvm_error");
  const CliRun w = run({"wshape", "--reps", "1", "--subset", "20", "--validation-size", "60", "--test-size", "100",
                     "--learn-max-iter", "3"});
  EXPECT_EQ(w.code, 0) << w.err;
  EXPECT_EQ(first_line(w.out), "method,subset,split,mean_error,std,reps");
}

TEST_F(CliTest, ErrorsAndExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"no-such-command"}).code, 2);
  EXPECT_EQ(run({"train-wsvm"}).code, 2);
  EXPECT_EQ(run({"train-wsvm", "--data", path("missing.txt")}).code, 1);
  EXPECT_EQ(run({"train-wsvm", "--data", path("data.txt"), "--kernel", "poly"}).code, 1);
  EXPECT_EQ(run({"train-wsvm", "--help"}).code, 0);
}

TEST_F(CliTest, OutputIsDeterministic) {
  const std::vector<std::string> args{"train-wsvm", "--data", path("data.txt"), "--kernel", "rbf:1"};
  const CliRun a = run(args);
  const CliRun b = run(args);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.err, b.err);
}

}  // namespace
}  // namespace lupi
