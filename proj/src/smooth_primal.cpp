#include "lupi/smooth_primal.hpp"

#include "lupi/wsvm.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

namespace {

struct Pointwise {
  Vector t;
  Vector u;  // y_i l'(t_i)
  Vector v;  // c_i l''(t_i)
  double loss = 0.0;
};

Pointwise evaluate(const Matrix& K, const Vector& y, const Vector& c, double delta, const Vector& alpha, double b) {
  Pointwise p;
  p.t = y.cwiseProduct(((K * alpha).array() + b).matrix());
  p.u.resize(y.size());
  p.v.resize(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const LossValue l = smooth_hinge(p.t[i], delta);
    p.u[i] = y[i] * l.d1;
    p.v[i] = c[i] * l.d2;
    p.loss += c[i] * l.value;
  }
  return p;
}

}  // namespace

Matrix regularized_gram(const Matrix& K, double jitter) {
  Matrix out = K;
  if (K.rows() > 0) out.diagonal().array() += jitter * K.trace() / static_cast<double>(K.rows());
  return out;
}

double primal_objective(const Matrix& K, const Vector& y, const Vector& c, double delta, const Vector& alpha,
                        double b) {
  return 0.5 * alpha.dot(K * alpha) + evaluate(K, y, c, delta, alpha, b).loss;
}

Vector primal_gradient(const Matrix& K, const Vector& y, const Vector& c, double delta, const Vector& alpha, double b) {
  const Pointwise p = evaluate(K, y, c, delta, alpha, b);
  Vector g(alpha.size() + 1);
  g.head(alpha.size()) = K * (alpha + p.u.cwiseProduct(c));
  g[alpha.size()] = p.u.dot(c);
  return g;
}

PrimalModel solve_primal(const Matrix& K, const Vector& y, const Vector& c, double delta, const PrimalOptions& opts) {
  SmoothLossSpec{delta}.validate();
  const Eigen::Index n = y.size();
  if (K.rows() != n || K.cols() != n || c.size() != n) throw InvalidInput("solve_primal: size mismatch");
  if ((c.array() < 0.0).any() || !c.allFinite()) throw InvalidInput("solve_primal: weights must be nonnegative");
  if (!(opts.tol > 0.0)) throw InvalidInput("solve_primal: tolerance must be positive");

  PrimalModel m;
  m.y = y;
  m.c = c;
  m.delta = delta;
  m.alpha = opts.initial_alpha ? *opts.initial_alpha : Vector::Zero(n);
  m.b = opts.initial_b.value_or(0.0);
  if (m.alpha.size() != n) throw InvalidInput("solve_primal: initial alpha has the wrong length");

  const double c_one = std::max(1.0, c.sum());
  Matrix M(n + 1, n + 1);
  Vector rhs(n + 1);

  Pointwise p = evaluate(K, y, c, delta, m.alpha, m.b);
  double J = 0.5 * m.alpha.dot(K * m.alpha) + p.loss;
  bool stalled = false;
  double stalled_norm = 0.0;
  for (m.iterations = 0;; ++m.iterations) {
    const Vector r = m.alpha + p.u.cwiseProduct(c);
    const double gb = p.u.dot(c);
    m.gradient_norm = std::abs(gb) / c_one;
    for (Eigen::Index i = 0; i < n; ++i) m.gradient_norm = std::max(m.gradient_norm, std::abs(r[i]) / std::max(1.0, c[i]));
    if (m.gradient_norm <= opts.tol) break;
    // Round-off floor: the objective no longer measures progress and the last
    // Newton step did not shrink the residual either.
    if (stalled && m.gradient_norm > 0.5 * stalled_norm && m.gradient_norm <= 1e3 * opts.tol) break;
    if (m.iterations >= opts.max_iter) {
      throw NotConverged("primal Newton solver reached the iteration cap", m.gradient_norm);
    }

    // Reduced Newton system; when no point is on the curved part of the loss
    // the offset row is damped and replaced by a jump to the nearest band.
    const double curvature = p.v.sum();
    const double damping = curvature > 1e-12 * c_one ? 0.0 : std::max(c.sum(), 1.0) / delta;
    M.setZero();
    M.topLeftCorner(n, n) = p.v.asDiagonal() * K;
    M.topLeftCorner(n, n).diagonal().array() += 1.0;
    M.topRightCorner(n, 1) = p.v;
    M.bottomLeftCorner(1, n).setOnes();
    M(n, n) = -damping;
    rhs.head(n) = -r;
    rhs[n] = -m.alpha.sum();
    Vector s = M.partialPivLu().solve(rhs);
    if (damping > 0.0 && gb != 0.0) {
      // Without curvature the loss is piecewise linear in b, so jump b until
      // the first weighted point reaches the middle of the curved band.
      const Vector t_alpha = y.cwiseProduct(K * s.head(n)) + p.t;
      const double dir = gb < 0.0 ? 1.0 : -1.0;
      double jump = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        if (c[i] <= 0.0) continue;
        if (t_alpha[i] > 1.0 - 2.0 * delta && t_alpha[i] < 1.0) jump = 0.0;
        const double rate = y[i] * dir;
        if (rate > 0.0 && t_alpha[i] <= 1.0 - 2.0 * delta) jump = std::min(jump, 1.0 - delta - t_alpha[i]);
        if (rate < 0.0 && t_alpha[i] >= 1.0) jump = std::min(jump, t_alpha[i] - (1.0 - delta));
      }
      if (std::isfinite(jump)) s[n] = dir * jump;
    }
    const Vector Kr = K * r;
    double slope = Kr.dot(s.head(n)) + gb * s[n];
    if (!(slope < 0.0) || !s.allFinite()) {
      s.head(n) = -r;
      s[n] = -gb * delta / std::max(c.sum(), 1.0);
      slope = -r.dot(Kr) - gb * gb * delta / std::max(c.sum(), 1.0);
    }

    double step = 1.0;
    bool accepted = false;
    stalled = false;
    stalled_norm = m.gradient_norm;
    for (int k = 0; k < 60; ++k, step *= 0.5) {
      const Vector a_new = m.alpha + step * s.head(n);
      const double b_new = m.b + step * s[n];
      Pointwise trial = evaluate(K, y, c, delta, a_new, b_new);
      const double J_new = 0.5 * a_new.dot(K * a_new) + trial.loss;
      const double slack = 1e-14 * (1.0 + std::abs(J));
      if (J_new <= J + 1e-4 * step * slope + slack) {
        stalled = J_new > J - slack;
        m.alpha = a_new;
        m.b = b_new;
        p = std::move(trial);
        J = J_new;
        accepted = true;
        break;
      }
    }
    if (!accepted && m.gradient_norm <= 1e3 * opts.tol) break;
    if (!accepted) throw NotConverged("primal Newton line search failed", m.gradient_norm);
  }
  m.margins = p.t;
  m.objective = J;
  return m;
}

PrimalModel solve_primal(const Dataset& data, const KernelSpec& spec, const Vector& c, double delta,
                         const PrimalOptions& opts) {
  PrimalModel m = solve_primal(regularized_gram(gram(spec, data.x()), opts.jitter), data.y(), c, delta, opts);
  m.kernel = spec;
  m.train_x = data.x();
  return m;
}

Vector predict(const PrimalModel& model, const Matrix& points) {
  if (points.cols() != model.train_x.cols()) throw InvalidInput("predict: feature dimension mismatch");
  return (gram(model.kernel, points, model.train_x) * model.alpha).array() + model.b;
}

}  // namespace lupi
