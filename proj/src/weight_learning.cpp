#include "lupi/weight_learning.hpp"

#include "lupi/serialize.hpp"
#include "lupi/wsvm.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace lupi {

GradientWorkspace implicit_gradient(const PrimalModel& inner, const Matrix& K) {
  const Eigen::Index n = inner.y.size();
  if (K.rows() != n || K.cols() != n) throw InvalidInput("implicit_gradient: Gram size mismatch");
  GradientWorkspace ws;
  ws.u.resize(n);
  ws.v.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const LossValue l = smooth_hinge(inner.margins[i], inner.delta);
    ws.u[i] = inner.y[i] * l.d1;
    ws.v[i] = inner.c[i] * l.d2;
  }
  ws.system = Matrix::Zero(n + 1, n + 1);
  ws.system.topLeftCorner(n, n) = ws.v.asDiagonal() * K;
  ws.system.topLeftCorner(n, n).diagonal().array() += 1.0;
  ws.system.topRightCorner(n, 1) = ws.v;
  ws.system.bottomLeftCorner(1, n).setOnes();

  ws.fallback = !(ws.v.array() > 0.0).any();
  if (ws.fallback) {
    ws.d_alpha = Matrix((-ws.u).asDiagonal());
    ws.d_b = Vector::Zero(n);
    return ws;
  }
  Matrix rhs = Matrix::Zero(n + 1, n);
  rhs.topRows(n) = Matrix((-ws.u).asDiagonal());
  // The system is nonsingular whenever v != 0 and K is positive definite, but
  // its rows can be badly scaled, so only an exactly zero pivot is rejected.
  Eigen::FullPivLU<Matrix> lu(ws.system);
  lu.setThreshold(0.0);
  const Matrix X = lu.solve(rhs);
  if (!lu.isInvertible() || !X.allFinite()) throw NotConverged("implicit gradient system is singular", 0.0);
  ws.d_alpha = X.topRows(n);
  ws.d_b = X.row(n).transpose();
  return ws;
}

namespace {

Vector validation_scores(const PrimalModel& inner, const Matrix& K_cross, const Vector& y_val) {
  if (K_cross.rows() != inner.alpha.size() || K_cross.cols() != y_val.size()) {
    throw InvalidInput("validation: cross Gram size mismatch");
  }
  return y_val.cwiseProduct(((K_cross.transpose() * inner.alpha).array() + inner.b).matrix());
}

}  // namespace

double validation_loss(const PrimalModel& inner, const Matrix& K_cross, const Vector& y_val) {
  const Vector t = validation_scores(inner, K_cross, y_val);
  double total = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) total += smooth_hinge(t[j], inner.delta).value;
  return total;
}

Vector validation_gradient(const PrimalModel& inner, const GradientWorkspace& ws, const Matrix& K_cross,
                           const Vector& y_val) {
  const Vector t = validation_scores(inner, K_cross, y_val);
  Vector r(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) r[j] = smooth_hinge(t[j], inner.delta).d1 * y_val[j];
  return ws.d_alpha.transpose() * (K_cross * r) + ws.d_b * r.sum();
}

WeightLearningRun learn_weights_for_delta(const Dataset& train, const Dataset& validation, const KernelSpec& spec,
                                          double delta, const WeightLearningConfig& config) {
  if (train.dim() != validation.dim()) throw InvalidInput("learn_weights: feature dimensions differ");
  if (validation.size() == 0) throw InvalidInput("learn_weights: empty validation set");
  SmoothLossSpec{delta}.validate();
  const Eigen::Index n = train.size();
  const Matrix K = regularized_gram(gram(spec, train.x()), config.inner.jitter);
  const Matrix K_cross = gram(spec, train.x(), validation.x());
  const Vector& yv = validation.y();
  const Vector c0 = config.initial ? *config.initial : Vector::Ones(n);
  if (c0.size() != n || (c0.array() < 0.0).any()) throw InvalidInput("learn_weights: invalid initial weights");

  WeightLearningRun run;
  run.delta = delta;
  const double cap = config.weight_cap * std::max(1.0, c0.size() ? c0.maxCoeff() : 0.0);
  PrimalOptions inner_opts = config.inner;
  std::optional<PrimalModel> warm;
  // Inner solutions of every accepted evaluation, so the final weights need no fresh solve.
  std::vector<PrimalModel> solved;

  // Evaluates the outer objective at c, caching the inner solution for warm starts.
  auto evaluate_c = [&](const Vector& c, Vector& grad_c) {
    PrimalOptions o = inner_opts;
    if (warm) {
      o.initial_alpha = warm->alpha;
      o.initial_b = warm->b;
    }
    if (!c.allFinite() || c.maxCoeff() > cap) {
      ++run.rejected_steps;
      return std::numeric_limits<double>::infinity();
    }
    PrimalModel m;
    GradientWorkspace ws;
    try {
      m = solve_primal(K, train.y(), c, delta, o);
      ws = implicit_gradient(m, K);
    } catch (const NotConverged&) {
      ++run.rejected_steps;
      return std::numeric_limits<double>::infinity();
    }
    grad_c = validation_gradient(m, ws, K_cross, yv);
    const double f = validation_loss(m, K_cross, yv);
    solved.push_back(m);
    warm = std::move(m);
    return f;
  };

  BfgsOptions bo;
  bo.max_iter = config.max_iter;
  bo.grad_tol = config.grad_tol;
  BfgsResult res;
  if (config.mode == NonnegativityMode::log_weights) {
    if ((c0.array() <= 0.0).any()) throw InvalidInput("learn_weights: log mode needs positive initial weights");
    const Objective obj = [&](const Vector& theta, Vector& grad) {
      const Vector c = theta.array().exp();
      Vector gc;
      const double f = evaluate_c(c, gc);
      if (std::isfinite(f)) grad = gc.cwiseProduct(c);
      return f;
    };
    res = minimize_bfgs(obj, c0.array().log().matrix(), bo);
    run.c = res.x.array().exp();
  } else {
    const Objective obj = [&](const Vector& c, Vector& grad) { return evaluate_c(c, grad); };
    res = minimize_bfgs_bounded(obj, c0, Vector::Zero(n), bo);
    run.c = res.x;
  }
  run.initial_objective = res.log.front().objective;
  run.final_objective = res.f;
  run.iterations = res.iterations;
  run.converged = res.converged;
  run.hit_cap = res.hit_cap;
  run.log = res.log;

  const auto cached = std::find_if(solved.rbegin(), solved.rend(), [&](const PrimalModel& m) { return m.c == run.c; });
  if (cached != solved.rend()) {
    run.model = *cached;
  } else {
    PrimalOptions final_opts = config.inner;
    if (warm) {
      final_opts.initial_alpha = warm->alpha;
      final_opts.initial_b = warm->b;
    }
    run.model = solve_primal(K, train.y(), run.c, delta, final_opts);
  }
  run.model.kernel = spec;
  run.model.train_x = train.x();
  run.validation_error = error_rate((K_cross.transpose() * run.model.alpha).array() + run.model.b, yv);
  return run;
}

WeightLearningResult learn_weights(const Dataset& train, const Dataset& validation, const KernelSpec& spec,
                                   const WeightLearningConfig& config) {
  if (config.delta_grid.empty()) throw InvalidInput("learn_weights: empty delta grid");
  std::vector<double> grid = config.delta_grid;
  std::sort(grid.begin(), grid.end());
  WeightLearningResult out;
  for (double delta : grid) {
    out.runs.push_back(learn_weights_for_delta(train, validation, spec, delta, config));
    if (out.runs.back().validation_error < out.runs[out.best].validation_error) out.best = out.runs.size() - 1;
  }
  const WeightLearningRun& win = out.runs[out.best];
  out.c = win.c;
  out.model = win.model;
  out.delta = win.delta;
  return out;
}

void write_learning_log(std::ostream& out, const WeightLearningResult& result) {
  out << "delta,iteration,objective,step,grad_norm\n";
  for (const WeightLearningRun& run : result.runs) {
    for (const BfgsIterate& it : run.log) {
      out << format_double(run.delta) << ',' << it.iteration << ',' << format_double(it.objective) << ','
          << format_double(it.step) << ',' << format_double(it.grad_norm) << '\n';
    }
  }
}

}  // namespace lupi
