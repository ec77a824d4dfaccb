#include "cli.hpp"

#include "lupi/data_io.hpp"
#include "lupi/equivalence.hpp"
#include "lupi/experiment.hpp"
#include "lupi/kkt.hpp"
#include "lupi/serialize.hpp"
#include "lupi/svmplus.hpp"
#include "lupi/weight_learning.hpp"
#include "lupi/wsvm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace lupi {

namespace {

constexpr int kCheckFailed = 3;

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw InvalidInput("cannot write '" + path + "'");
  return f;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read config file '" + path + "'");
  return read_key_values(in);
}

/// Returns the value of --config in args (either form) and removes it.
std::string take_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  return path;
}

bool has_option(const std::vector<std::string>& args, const std::string& name) {
  const std::string flag = "--" + name;
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

Vector weights_or_ones(const std::string& path, Eigen::Index n) {
  if (path.empty()) return Vector::Ones(n);
  Vector c = read_weights_file(path);
  if (c.size() != n) throw InvalidInput("weights file has " + std::to_string(c.size()) + " lines, expected " +
                                        std::to_string(n));
  return c;
}

void write_csv_row(std::ostream& out, std::initializer_list<std::string> fields) {
  bool first = true;
  for (const std::string& f : fields) {
    if (!first) out << ',';
    out << f;
    first = false;
  }
  out << '\n';
}

std::string fmt(double v) { return format_double(v); }

struct Context {
  std::ostream& out;
  std::ostream& err;
  int code = 0;
};

// ---------------------------------------------------------------- train-wsvm

struct TrainWsvmArgs {
  std::string data;
  std::string weights;
  std::string kernel = "linear";
  std::string model_out;
  std::string test;
  double scale = 1.0;
  double tol = 1e-8;
  std::optional<double> offset;
  bool check = false;
};

void train_wsvm(const TrainWsvmArgs& a, Context& ctx) {
  const Dataset data = read_sparse_file(a.data);
  const KernelSpec spec = KernelSpec::parse(a.kernel);
  const Vector c = a.scale * weights_or_ones(a.weights, data.size());
  WsvmOptions opts;
  opts.tol = a.tol;
  opts.offset_override = a.offset;
  const Matrix K = gram(spec, data.x());
  const WsvmModel m = solve_wsvm(data, spec, K, c, opts);

  write_csv_row(ctx.out, {"index", "label", "weight", "alpha", "beta", "xi", "h", "decision"});
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    write_csv_row(ctx.out, {std::to_string(i), fmt(m.y[i]), fmt(c[i]), fmt(m.alpha[i]), fmt(m.beta[i]), fmt(m.xi[i]),
                            fmt(m.h[i]), fmt(m.decision[i])});
  }
  ctx.err << "b=" << fmt(m.b) << "\nb_lo=" << fmt(m.b_interval.lo) << "\nb_hi=" << fmt(m.b_interval.hi)
          << "\nobjective_primal=" << fmt(m.objective_primal) << "\nobjective_dual=" << fmt(m.objective_dual)
          << "\niterations=" << m.iterations << '\n';
  if (!a.test.empty()) {
    const Dataset test = read_sparse_file(a.test, data.dim());
    ctx.err << "test_error=" << fmt(error_rate(predict(m, test.x()), test.y())) << '\n';
  }
  if (!a.model_out.empty()) {
    std::ofstream f = open_out(a.model_out);
    write_model(f, m);
  }
  if (a.check) {
    const KktReport r = check_wsvm_kkt(m, K, std::max(a.tol * 100.0, 1e-6));
    ctx.err << r.to_text() << b_uniqueness(m, a.tol).to_text();
    if (!r.pass) ctx.code = kCheckFailed;
  }
}

// ------------------------------------------------------------- train-svmplus

struct TrainSvmPlusArgs {
  std::string data;
  std::string privileged;
  std::string kernel = "linear";
  std::string priv_kernel = "linear";
  std::string model_out;
  std::string weights_out;
  std::string test;
  double C = 1.0;
  double gamma = 1.0;
  double tol = 1e-8;
  bool check = false;
};

void train_svmplus(const TrainSvmPlusArgs& a, Context& ctx) {
  const Dataset data = read_sparse_file(a.data);
  const PrivilegedSet priv = read_privileged_file(a.privileged, data);
  const KernelSpec spec = KernelSpec::parse(a.kernel);
  const KernelSpec priv_spec = KernelSpec::parse(a.priv_kernel);
  SvmPlusOptions opts;
  opts.tol = a.tol;
  const Matrix K = gram(spec, data.x());
  const Matrix Kt = gram(priv_spec, priv.x());
  const SvmPlusModel m = solve_svmplus(data, priv, spec, priv_spec, K, Kt, a.C, a.gamma, opts);

  write_csv_row(ctx.out, {"index", "label", "alpha", "beta", "alpha_tilde", "xi", "h", "decision"});
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    write_csv_row(ctx.out, {std::to_string(i), fmt(m.y[i]), fmt(m.alpha[i]), fmt(m.beta[i]), fmt(m.alpha_tilde[i]),
                            fmt(m.xi[i]), fmt(m.h[i]), fmt(m.decision[i])});
  }
  ctx.err << "b=" << fmt(m.b) << "\nb_tilde=" << fmt(m.b_tilde) << "\npath=" << to_string(m.path)
          << "\nobjective_primal=" << fmt(m.objective_primal) << "\nobjective_dual=" << fmt(m.objective_dual)
          << "\niterations=" << m.iterations << '\n';
  if (!a.test.empty()) {
    const Dataset test = read_sparse_file(a.test, data.dim());
    ctx.err << "test_error=" << fmt(error_rate(predict(m, test.x()), test.y())) << '\n';
  }
  if (!a.model_out.empty()) {
    std::ofstream f = open_out(a.model_out);
    write_model(f, m);
  }
  if (!a.weights_out.empty()) write_weights_file(a.weights_out, weights_from_svmplus(m));
  if (a.check) {
    const KktReport r = check_svmplus_kkt(m, K, Kt, std::max(a.tol * 100.0, 1e-6));
    ctx.err << r.to_text();
    if (!r.pass) ctx.code = kCheckFailed;
  }
}

// ------------------------------------------------------------- learn-weights

struct LearnArgs {
  std::string train;
  std::string validation;
  std::string kernel = "rbf:1";
  std::string weights_out;
  std::string model_out;
  std::string mode = "log";
  std::vector<double> delta{0.01, 0.1, 0.5, 1.0};
  double init = 1.0;
  std::size_t max_iter = 200;
  double grad_tol = 1e-6;
};

void learn(const LearnArgs& a, Context& ctx) {
  Dataset train = read_sparse_file(a.train);
  Dataset validation = read_sparse_file(a.validation, train.dim());
  if (validation.dim() > train.dim()) train = read_sparse_file(a.train, validation.dim());
  WeightLearningConfig cfg;
  cfg.delta_grid = a.delta;
  cfg.max_iter = a.max_iter;
  cfg.grad_tol = a.grad_tol;
  if (a.mode == "log") {
    cfg.mode = NonnegativityMode::log_weights;
  } else if (a.mode == "projected") {
    cfg.mode = NonnegativityMode::projected;
  } else {
    throw InvalidInput("unknown mode '" + a.mode + "' (expected log or projected)");
  }
  cfg.initial = Vector::Constant(train.size(), a.init);
  const WeightLearningResult r = learn_weights(train, validation, KernelSpec::parse(a.kernel), cfg);
  write_learning_log(ctx.out, r);
  if (!a.weights_out.empty()) write_weights_file(a.weights_out, r.c);
  const WeightLearningRun& best = r.runs[r.best];
  ctx.err << "delta=" << fmt(r.delta) << "\nvalidation_error=" << fmt(best.validation_error)
          << "\ninitial_objective=" << fmt(best.initial_objective) << "\nfinal_objective=" << fmt(best.final_objective)
          << "\nconverged=" << (best.converged ? "true" : "false") << "\nhit_cap=" << (best.hit_cap ? "true" : "false")
          << '\n';
}

// --------------------------------------------------------------------- equiv

struct EquivArgs {
  std::string data;
  std::string weights;
  std::string kernel = "linear";
  std::string candidate;
  std::string construct;
  double tol = 1e-8;
};

void equiv(const EquivArgs& a, Context& ctx) {
  const Dataset data = read_sparse_file(a.data);
  const Vector c = weights_or_ones(a.weights, data.size());
  WsvmOptions opts;
  opts.tol = a.tol;
  const WsvmModel m = solve_wsvm(data, KernelSpec::parse(a.kernel), c, opts);
  std::optional<Vector> candidate;
  if (!a.candidate.empty()) candidate = weights_or_ones(a.candidate, data.size());
  const EquivalenceReport r = equivalence_report(m, c, candidate, a.tol);
  ctx.out << r.to_text();
  if (!a.construct.empty()) {
    if (!r.construction) throw NotRepresentable(r.not_representable_reason);
    write_sparse_file(a.construct, Dataset(r.construction->features.x(), data.y()));
  }
}

// ------------------------------------------------------------ counterexample

void counterexample(Context& ctx) {
  Matrix x(3, 1);
  x << 1, 2, 3;
  Vector y(3);
  y << 1, -1, 1;
  Vector c(3);
  c << 4, 6, 2;
  const Dataset data(x, y);
  const WsvmModel m = solve_wsvm(data, KernelSpec::linear(), c);
  const double w = x.col(0).dot(m.coefficients());
  const RhoValues r = rho(c, m.xi);
  bool representable = true;
  try {
    (void)construct_privileged(m, c);
  } catch (const NotRepresentable&) {
    representable = false;
  }

  write_csv_row(ctx.out, {"quantity", "value", "expected", "ok"});
  bool all = true;
  auto row = [&](const std::string& name, double value, double expected, double tol) {
    const bool ok = std::abs(value - expected) <= tol;
    all = all && ok;
    write_csv_row(ctx.out, {name, fmt(value), fmt(expected), ok ? "true" : "false"});
  };
  row("w", w, -2.0, 1e-6);
  row("b", m.b, 3.0, 1e-6);
  const double xi_ref[] = {0.0, 0.0, 4.0};
  const double alpha_ref[] = {4.0, 6.0, 2.0};
  for (int i = 0; i < 3; ++i) row("xi" + std::to_string(i + 1), m.xi[i], xi_ref[i], 1e-6);
  for (int i = 0; i < 3; ++i) row("alpha" + std::to_string(i + 1), m.alpha[i], alpha_ref[i], 1e-6);
  for (int i = 0; i < 3; ++i) row("beta" + std::to_string(i + 1), m.beta[i], 0.0, 1e-6);
  row("rho_unnormalized", r.unnormalized, -8.0, 1e-9);
  row("rho_normalized", r.normalized, -2.0 / 3.0, 1e-9);
  row("representable", representable ? 1.0 : 0.0, 0.0, 0.0);
  if (!all) ctx.code = kCheckFailed;
}

// ------------------------------------------------------------------- figure3

struct Figure3Args {
  std::size_t reps = 50;
  std::uint64_t seed = 1;
  double C = 1.0;
  double distance = 200.0;
  Eigen::Index per_class = 50;
  Eigen::Index outliers = 2;
  Eigen::Index test_per_class = 500;
  bool check = false;
};

void figure3(const Figure3Args& a, Context& ctx) {
  OutlierStudy s;
  s.blobs.per_class = a.per_class;
  s.blobs.outliers = a.outliers;
  s.blobs.outlier_distance = a.distance;
  s.C = a.C;
  s.repetitions = a.reps;
  s.seed = a.seed;
  s.test_per_class = a.test_per_class;
  const std::vector<OutlierTrial> trials = run_outlier_study(s);
  write_outlier_trials(ctx.out, trials);
  if (a.check) {
    std::size_t better = 0;
    double svm = 0.0;
    double wsvm = 0.0;
    for (const OutlierTrial& t : trials) {
      better += t.wsvm_error < t.svm_error ? 1 : 0;
      svm += t.svm_error;
      wsvm += t.wsvm_error;
    }
    const double n = static_cast<double>(trials.size());
    const double frac = better / n;
    const bool pass = frac >= 0.95 && svm / n >= 0.4 && wsvm / n <= 0.05;
    ctx.err << "wsvm_better_fraction=" << fmt(frac) << "\nsvm_mean_error=" << fmt(svm / n)
            << "\nwsvm_mean_error=" << fmt(wsvm / n) << "\npass=" << (pass ? "true" : "false") << '\n';
    if (!pass) ctx.code = kCheckFailed;
  }
}

// -------------------------------------------------------------------- wshape

struct WshapeArgs {
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  Eigen::Index subset = 40;
  Eigen::Index validation_size = 400;
  Eigen::Index test_size = 2000;
  double sigma = 0.3;
  std::string methods = "svm,wsvm-learned";
  std::string out;
  std::size_t learn_max_iter = 200;
};

int experiment_output(const ExperimentConfig& cfg, const std::string& out_path, const std::string& replication_out,
                      Context& ctx) {
  const ExperimentResult r = run_experiment(cfg);
  if (out_path.empty()) {
    write_results(ctx.out, r.table);
  } else {
    emit_results(r.table, out_path);
  }
  if (!replication_out.empty()) {
    std::ofstream f = open_out(replication_out);
    write_replication(f, r.replication);
  }
  for (const std::string& line : r.log) ctx.err << line << '\n';
  return 0;
}

void wshape(const WshapeArgs& a, Context& ctx) {
  ExperimentConfig cfg;
  cfg.source = "wmixture";
  cfg.split = SplitMode::fixed_validation;
  cfg.subset_sizes = {a.subset};
  cfg.validation_size = a.validation_size;
  cfg.test_size = a.test_size;
  cfg.w_sigma = a.sigma;
  cfg.repetitions = a.reps;
  cfg.seed = a.seed;
  cfg.learning.max_iter = a.learn_max_iter;
  std::map<std::string, std::string> kv{{"methods", a.methods}};
  apply_key_values(cfg, kv);
  experiment_output(cfg, a.out, "", ctx);
}

// ---------------------------------------------------------------- experiment

struct ExperimentArgs {
  std::string config;
  std::vector<std::string> set;
  std::string out;
  std::string replication_out;
};

void experiment(const ExperimentArgs& a, Context& ctx) {
  ExperimentConfig cfg;
  if (!a.config.empty()) apply_key_values(cfg, read_config_file(a.config));
  std::map<std::string, std::string> overrides;
  for (const std::string& s : a.set) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InvalidInput("--set expects key=value, got '" + s + "'");
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  apply_key_values(cfg, overrides);
  experiment_output(cfg, a.out, a.replication_out, ctx);
}

}  // namespace

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = raw_args;
  Context ctx{out, err};

  CLI::App app{"Weighted SVM and SVM+ toolkit"};
  app.require_subcommand(1);

  TrainWsvmArgs tw;
  auto* cmd_tw = app.add_subcommand("train-wsvm", "Train a weighted SVM and print per-instance values as CSV");
  cmd_tw->add_option("--data", tw.data, "Training data (sparse format)")->required();
  cmd_tw->add_option("--weights", tw.weights, "Weight companion file; defaults to all ones");
  cmd_tw->add_option("--scale", tw.scale, "Multiplier applied to all weights");
  cmd_tw->add_option("--kernel", tw.kernel, "linear or rbf:<bandwidth>");
  cmd_tw->add_option("--tol", tw.tol, "Solver tolerance");
  cmd_tw->add_option("--offset", tw.offset, "Use this offset instead of the interval midpoint");
  cmd_tw->add_option("--model-out", tw.model_out, "Write the model record here");
  cmd_tw->add_option("--test", tw.test, "Report the error rate on this file");
  cmd_tw->add_flag("--check", tw.check, "Print the optimality report");

  TrainSvmPlusArgs ts;
  auto* cmd_ts = app.add_subcommand("train-svmplus", "Train an SVM+ and print per-instance values as CSV");
  cmd_ts->add_option("--data", ts.data, "Training data (sparse format)")->required();
  cmd_ts->add_option("--privileged", ts.privileged, "Privileged feature companion file")->required();
  cmd_ts->add_option("--C", ts.C, "Regularization constant");
  cmd_ts->add_option("--gamma", ts.gamma, "Correcting-space regularization; 0 selects the reduction");
  cmd_ts->add_option("--kernel", ts.kernel, "Decision-space kernel");
  cmd_ts->add_option("--priv-kernel", ts.priv_kernel, "Correcting-space kernel");
  cmd_ts->add_option("--tol", ts.tol, "Solver tolerance");
  cmd_ts->add_option("--model-out", ts.model_out, "Write the model record here");
  cmd_ts->add_option("--weights-out", ts.weights_out, "Write alpha + beta as a weight companion file");
  cmd_ts->add_option("--test", ts.test, "Report the error rate on this file");
  cmd_ts->add_flag("--check", ts.check, "Print the optimality report");

  LearnArgs lw;
  auto* cmd_lw = app.add_subcommand("learn-weights", "Learn instance weights on a validation set; prints the log CSV");
  cmd_lw->add_option("--train", lw.train, "Training data")->required();
  cmd_lw->add_option("--validation", lw.validation, "Validation data")->required();
  cmd_lw->add_option("--kernel", lw.kernel, "linear or rbf:<bandwidth>");
  cmd_lw->add_option("--delta", lw.delta, "Smoothing widths to try")->delimiter(',');
  cmd_lw->add_option("--mode", lw.mode, "log or projected");
  cmd_lw->add_option("--init", lw.init, "Initial value of every weight");
  cmd_lw->add_option("--max-iter", lw.max_iter, "Outer iteration cap");
  cmd_lw->add_option("--grad-tol", lw.grad_tol, "Outer gradient tolerance");
  cmd_lw->add_option("--weights-out", lw.weights_out, "Write the learned weights here");

  EquivArgs eq;
  auto* cmd_eq = app.add_subcommand("equiv", "Equivalence report for a WSVM solution (key=value)");
  cmd_eq->add_option("--data", eq.data, "Training data")->required();
  cmd_eq->add_option("--weights", eq.weights, "Weight companion file; defaults to all ones");
  cmd_eq->add_option("--kernel", eq.kernel, "linear or rbf:<bandwidth>");
  cmd_eq->add_option("--candidate", eq.candidate, "Weight file to test for family membership");
  cmd_eq->add_option("--construct", eq.construct, "Write constructed privileged features here");
  cmd_eq->add_option("--tol", eq.tol, "Tolerance");

  ExperimentArgs ex;
  auto* cmd_ex = app.add_subcommand("experiment", "Run a configured experiment and print the results CSV");
  cmd_ex->add_option("--set", ex.set, "Override a configuration key (key=value)");
  cmd_ex->add_option("--out", ex.out, "Write results here instead of standard output");
  cmd_ex->add_option("--replication-out", ex.replication_out, "Write the offset-copy replication checks here");

  auto* cmd_ce = app.add_subcommand("counterexample", "Solve the three-point counterexample and compare to expectations");

  Figure3Args f3;
  auto* cmd_f3 = app.add_subcommand("figure3", "Blobs with planted outliers: SVM versus WSVM with zeroed outliers");
  cmd_f3->add_option("--reps", f3.reps, "Repetitions");
  cmd_f3->add_option("--seed", f3.seed, "Random seed");
  cmd_f3->add_option("--C", f3.C, "Regularization constant");
  cmd_f3->add_option("--distance", f3.distance, "Outlier distance beyond the opposite blob");
  cmd_f3->add_option("--per-class", f3.per_class, "Training points per class");
  cmd_f3->add_option("--outliers", f3.outliers, "Number of planted outliers");
  cmd_f3->add_option("--test-per-class", f3.test_per_class, "Test points per class");
  cmd_f3->add_flag("--check", f3.check, "Evaluate the expected behaviour");

  WshapeArgs ws;
  auto* cmd_ws = app.add_subcommand("wshape", "W-shaped mixture with a large fixed validation set");
  cmd_ws->add_option("--reps", ws.reps, "Repetitions");
  cmd_ws->add_option("--seed", ws.seed, "Random seed");
  cmd_ws->add_option("--subset", ws.subset, "Training subset size");
  cmd_ws->add_option("--validation-size", ws.validation_size, "Fixed validation set size");
  cmd_ws->add_option("--test-size", ws.test_size, "Test set size");
  cmd_ws->add_option("--sigma", ws.sigma, "Component standard deviation");
  cmd_ws->add_option("--methods", ws.methods, "Comma-separated methods");
  cmd_ws->add_option("--learn-max-iter", ws.learn_max_iter, "Outer iteration cap for weight learning");
  cmd_ws->add_option("--out", ws.out, "Write results here instead of standard output");

  try {
    const std::string config = take_config(args);
    if (!config.empty()) {
      if (!args.empty() && args[0] == "experiment") {
        ex.config = config;
      } else {
        for (const auto& [key, value] : read_config_file(config)) {
          if (!has_option(args, key)) args.push_back("--" + key + "=" + value);
        }
      }
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (cmd_tw->parsed()) train_wsvm(tw, ctx);
    if (cmd_ts->parsed()) train_svmplus(ts, ctx);
    if (cmd_lw->parsed()) learn(lw, ctx);
    if (cmd_eq->parsed()) equiv(eq, ctx);
    if (cmd_ex->parsed()) experiment(ex, ctx);
    if (cmd_ce->parsed()) counterexample(ctx);
    if (cmd_f3->parsed()) figure3(f3, ctx);
    if (cmd_ws->parsed()) wshape(ws, ctx);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return ctx.code;
}

}  // namespace lupi
