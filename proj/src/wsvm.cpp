#include "lupi/wsvm.hpp"

#include "lupi/interior_qp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace lupi {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_weights(const Vector& y, const Vector& c) {
  if (c.size() != y.size()) throw InvalidInput("weight vector length does not match the dataset");
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (!(c[i] >= 0.0) || !std::isfinite(c[i])) throw InvalidInput("weights must be finite and nonnegative");
  }
  if (!(c.sum() > 0.0)) throw InvalidInput("all weights are zero");
}

WsvmDual run_smo(const Matrix& K, const Vector& y, const Vector& c, Vector alpha, const WsvmOptions& opts) {
  const Eigen::Index n = y.size();
  // G = Q alpha - 1 with Q = Y K Y.
  auto full_gradient = [&] {
    Vector g = K * alpha.cwiseProduct(y);
    return Vector(y.cwiseProduct(g).array() - 1.0);
  };
  Vector G = full_gradient();

  auto in_up = [&](Eigen::Index t) { return y[t] > 0 ? alpha[t] < c[t] : alpha[t] > 0.0; };
  auto in_low = [&](Eigen::Index t) { return y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < c[t]; };

  std::size_t iter = 0;
  int refreshes = 0;
  double violation = 0.0;
  while (true) {
    double gmax = -kInf;
    Eigen::Index i = -1;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (in_up(t) && -y[t] * G[t] > gmax) {
        gmax = -y[t] * G[t];
        i = t;
      }
    }
    double gmax2 = -kInf;
    Eigen::Index j = -1;
    double best = kInf;
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      gmax2 = std::max(gmax2, y[t] * G[t]);
      if (i < 0) continue;
      const double grad_diff = gmax + y[t] * G[t];
      if (grad_diff > 0.0) {
        double quad = K(i, i) + K(t, t) - 2.0 * K(i, t);
        if (quad <= 0.0) quad = kTau;
        const double gain = -(grad_diff * grad_diff) / quad;
        if (gain < best) {
          best = gain;
          j = t;
        }
      }
    }
    violation = (i < 0 || gmax2 == -kInf) ? 0.0 : gmax + gmax2;
    if (j < 0 || violation < opts.tol) {
      // Guard against drift in the incrementally maintained gradient.
      const Vector fresh = full_gradient();
      const bool drifted = (fresh - G).cwiseAbs().maxCoeff() > 0.1 * opts.tol;
      G = fresh;
      if (drifted && refreshes++ < 5) continue;
      break;
    }
    if (iter >= opts.max_iter) {
      throw NotConverged("WSVM solver reached the iteration cap with violation " + std::to_string(violation),
                         violation);
    }
    ++iter;

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double ci = c[i];
    const double cj = c[j];
    if (y[i] != y[j]) {
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > ci - cj) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = ci - diff;
        }
      } else if (alpha[j] > cj) {
        alpha[j] = cj;
        alpha[i] = cj + diff;
      }
    } else {
      double quad = K(i, i) + K(j, j) - 2.0 * K(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > ci) {
        if (alpha[i] > ci) {
          alpha[i] = ci;
          alpha[j] = sum - ci;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > cj) {
        if (alpha[j] > cj) {
          alpha[j] = cj;
          alpha[i] = sum - cj;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    G.array() += y.array() * (K.col(i).array() * di + K.col(j).array() * dj);
  }

  WsvmDual out;
  out.g = K * alpha.cwiseProduct(y);
  out.alpha = std::move(alpha);
  out.iterations = iter;
  out.violation = violation;
  return out;
}


// Interior-point solution of the same dual over the indices with c_i > 0,
// using slacks s = c - alpha.
Vector interior_dual(const Matrix& K, const Vector& y, const Vector& c, double tol) {
  const Eigen::Index n = y.size();
  std::vector<Eigen::Index> act;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (c[i] > 0.0) act.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(act.size());
  NonnegQp qp;
  qp.H = Matrix::Zero(2 * m, 2 * m);
  qp.g = Vector::Zero(2 * m);
  qp.A = Matrix::Zero(1 + m, 2 * m);
  qp.r = Vector::Zero(1 + m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) qp.H(a, b) = y[act[a]] * y[act[b]] * K(act[a], act[b]);
    qp.g[a] = -1.0;
    qp.A(0, a) = y[act[a]];
    qp.A(1 + a, a) = 1.0;
    qp.A(1 + a, m + a) = 1.0;
    qp.r[1 + a] = c[act[a]];
  }
  NonnegQpOptions qo;
  qo.tol = std::min(1e-12, tol);
  const NonnegQpSolution sol = solve_nonneg_qp(qp, qo);
  Vector alpha = Vector::Zero(n);
  for (Eigen::Index a = 0; a < m; ++a) alpha[act[a]] = std::clamp(sol.x[a], 0.0, c[act[a]]);
  return alpha;
}

// Snaps near-bound entries to the bounds and restores y'alpha = 0 by moving
// the entries with the most room first.
Vector make_feasible(Vector alpha, const Vector& y, const Vector& c) {
  const Eigen::Index n = y.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double eps = 1e-9 * std::max(1.0, c[i]);
    if (alpha[i] < eps) alpha[i] = 0.0;
    if (alpha[i] > c[i] - eps) alpha[i] = c[i];
  }
  for (int pass = 0; pass < 2; ++pass) {
    double r = alpha.dot(y);
    if (r == 0.0) break;
    // Decreasing r needs alpha_i down for y_i > 0 and up for y_i < 0.
    std::vector<std::pair<double, Eigen::Index>> room;
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool down = (y[i] > 0) == (r > 0);
      const double space = down ? alpha[i] : c[i] - alpha[i];
      const bool interior = alpha[i] > 0.0 && alpha[i] < c[i];
      if (space > 0.0 && (interior || pass == 1)) room.emplace_back(space, i);
    }
    std::stable_sort(room.begin(), room.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (const auto& [space, i] : room) {
      const double move = std::min(space, std::abs(r));
      const bool down = (y[i] > 0) == (r > 0);
      alpha[i] += down ? -move : move;
      r = alpha.dot(y);
      if (std::abs(r) <= 1e-15 * (1.0 + c.sum())) break;
    }
  }
  return alpha;
}

}  // namespace

double Interval::pick() const {
  const bool lo_finite = std::isfinite(lo);
  const bool hi_finite = std::isfinite(hi);
  if (lo_finite && hi_finite) return 0.5 * (lo + hi);
  if (lo_finite) return lo;
  if (hi_finite) return hi;
  return 0.0;
}

WsvmDual solve_wsvm_dual(const Matrix& K, const Vector& y, const Vector& c, const WsvmOptions& opts) {
  const Eigen::Index n = y.size();
  if (K.rows() != n || K.cols() != n) throw InvalidInput("Gram matrix size does not match labels");
  if (!(opts.tol > 0.0)) throw InvalidInput("tolerance must be positive");
  require_weights(y, c);

  Vector alpha = Vector::Zero(n);
  if (opts.initial_alpha) {
    alpha = *opts.initial_alpha;
    if (alpha.size() != n) throw InvalidInput("initial alpha has the wrong length");
    if ((alpha.array() < 0.0).any() || (alpha.array() > c.array()).any() ||
        std::abs(alpha.dot(y)) > 1e-12 * (1.0 + c.sum())) {
      throw InvalidInput("initial alpha is not dual feasible");
    }
  }

  if (!opts.interior_fallback) return run_smo(K, y, c, std::move(alpha), opts);
  WsvmOptions first = opts;
  first.max_iter = std::min(opts.max_iter, opts.fallback_after);
  try {
    return run_smo(K, y, c, std::move(alpha), first);
  } catch (const NotConverged&) {
  }
  WsvmDual out = run_smo(K, y, c, make_feasible(interior_dual(K, y, c, opts.tol), y, c), opts);
  out.iterations += first.max_iter;
  return out;
}

Interval offset_interval(const Vector& g, const Vector& y, const Vector& c) {
  struct Breakpoint {
    double at;
    double weight;
  };
  std::vector<Breakpoint> bps;
  double slope = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (c[i] <= 0.0) continue;
    // y = +1 contributes c_i [1 - g_i - b]_+ (active below its breakpoint),
    // y = -1 contributes c_i [1 + g_i + b]_+ (active above it).
    bps.push_back({y[i] > 0 ? 1.0 - g[i] : -1.0 - g[i], c[i]});
    if (y[i] > 0) slope -= c[i];
    total += c[i];
  }
  if (bps.empty()) return {};
  std::stable_sort(bps.begin(), bps.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.at < b.at; });
  // Every breakpoint raises the slope by its weight, whichever the label.
  const double flat = 1e-10 * total;
  std::vector<double> slopes(bps.size() + 1);
  slopes[0] = slope;
  for (std::size_t k = 0; k < bps.size(); ++k) slopes[k + 1] = slopes[k] + bps[k].weight;

  Interval out;
  std::size_t first = 0;
  while (first < slopes.size() && slopes[first] < -flat) ++first;
  out.lo = first == 0 ? -kInf : bps[first - 1].at;
  std::size_t last = slopes.size() - 1;
  while (last > 0 && slopes[last] > flat) --last;
  if (slopes[last] > flat) {
    out.hi = bps[0].at;
  } else {
    out.hi = last == bps.size() ? kInf : bps[last].at;
  }
  if (out.hi < out.lo) out.hi = out.lo;
  return out;
}

WsvmModel assemble_wsvm(const Matrix& K, const Vector& y, const Vector& c, WsvmDual dual, const WsvmOptions& opts) {
  WsvmModel m;
  m.y = y;
  m.c = c;
  m.alpha = std::move(dual.alpha);
  m.beta = c - m.alpha;
  m.b_interval = offset_interval(dual.g, y, c);
  m.b = opts.offset_override ? *opts.offset_override : m.b_interval.pick();
  m.decision = dual.g.array() + m.b;
  m.h = (1.0 - y.cwiseProduct(m.decision).array()).cwiseMax(0.0);
  m.xi = m.h;
  const Vector ya = m.alpha.cwiseProduct(y);
  const double quad = ya.dot(K * ya);
  m.objective_primal = 0.5 * quad + c.dot(m.xi);
  m.objective_dual = m.alpha.sum() - 0.5 * quad;
  m.iterations = dual.iterations;
  m.violation = dual.violation;
  return m;
}

WsvmModel solve_wsvm(const Dataset& data, const KernelSpec& spec, const Matrix& K, const Vector& c,
                     const WsvmOptions& opts) {
  WsvmDual dual = solve_wsvm_dual(K, data.y(), c, opts);
  WsvmModel m = assemble_wsvm(K, data.y(), c, std::move(dual), opts);
  m.kernel = spec;
  m.train_x = data.x();
  return m;
}

WsvmModel solve_wsvm(const Dataset& data, const KernelSpec& spec, const Vector& c, const WsvmOptions& opts) {
  return solve_wsvm(data, spec, gram(spec, data.x()), c, opts);
}

Vector predict(const WsvmModel& model, const Matrix& points) {
  if (points.cols() != model.train_x.cols()) throw InvalidInput("predict: feature dimension mismatch");
  const Matrix kq = gram(model.kernel, points, model.train_x);
  return (kq * model.coefficients()).array() + model.b;
}

double error_rate(const Vector& decision, const Vector& y) {
  if (decision.size() != y.size()) throw InvalidInput("error_rate: length mismatch");
  if (y.size() == 0) return 0.0;
  Eigen::Index wrong = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) wrong += label_of(decision[i]) != y[i] ? 1 : 0;
  return static_cast<double>(wrong) / static_cast<double>(y.size());
}

}  // namespace lupi
