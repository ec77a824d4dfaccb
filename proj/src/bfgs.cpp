#include "lupi/bfgs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

namespace {

struct Trial {
  double a = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  Vector g;
};

/// Strong-Wolfe search along p; returns false when no acceptable step was found.
bool wolfe_search(const Objective& fun, const Vector& x, double f0, const Vector& g0, const Vector& p, double a_init,
                  const BfgsOptions& opts, Trial& out) {
  const double d0 = g0.dot(p);
  std::size_t evals = 0;
  auto eval = [&](double a) {
    Trial t;
    t.a = a;
    t.g.resize(x.size());
    t.f = fun(x + a * p, t.g);
    t.d = std::isfinite(t.f) ? t.g.dot(p) : std::numeric_limits<double>::quiet_NaN();
    ++evals;
    return t;
  };
  auto sufficient = [&](const Trial& t) { return std::isfinite(t.f) && t.f <= f0 + opts.c1 * t.a * d0; };
  auto curvature = [&](const Trial& t) { return std::abs(t.d) <= -opts.c2 * d0; };

  Trial best;  // best Armijo point seen, used if the search runs out of evaluations
  best.a = 0.0;
  bool have_best = false;
  auto remember = [&](const Trial& t) {
    if (sufficient(t) && (!have_best || t.f < best.f)) {
      best = t;
      have_best = true;
    }
  };

  auto zoom = [&](Trial lo, Trial hi) {
    while (evals < opts.max_line_evals) {
      double a = 0.5 * (lo.a + hi.a);
      if (std::isfinite(hi.f) && std::isfinite(lo.d)) {
        // Safeguarded quadratic interpolation from lo's value and slope.
        const double da = hi.a - lo.a;
        const double denom = 2.0 * (hi.f - lo.f - lo.d * da);
        if (denom > 0.0) {
          const double cand = lo.a - lo.d * da * da / denom;
          const double lo_b = std::min(lo.a, hi.a) + 0.1 * std::abs(da);
          const double hi_b = std::max(lo.a, hi.a) - 0.1 * std::abs(da);
          if (cand > lo_b && cand < hi_b) a = cand;
        }
      }
      const Trial t = eval(a);
      remember(t);
      if (!sufficient(t) || t.f >= lo.f) {
        hi = t;
      } else {
        if (curvature(t)) {
          out = t;
          return true;
        }
        if (t.d * (hi.a - lo.a) >= 0.0) hi = lo;
        lo = t;
      }
      if (std::abs(hi.a - lo.a) < 1e-16 * std::max(1.0, lo.a)) break;
    }
    return false;
  };

  Trial prev;
  prev.a = 0.0;
  prev.f = f0;
  prev.d = d0;
  prev.g = g0;
  double a = a_init;
  for (int i = 1; evals < opts.max_line_evals; ++i) {
    const Trial t = eval(a);
    remember(t);
    if (!sufficient(t) || (i > 1 && t.f >= prev.f)) {
      if (zoom(prev, t)) return true;
      break;
    }
    if (curvature(t)) {
      out = t;
      return true;
    }
    if (t.d >= 0.0) {
      if (zoom(t, prev)) return true;
      break;
    }
    prev = t;
    a *= 2.0;
  }
  if (have_best) {
    out = best;
    return true;
  }
  return false;
}

void bfgs_update(Matrix& H, const Vector& s, const Vector& yv, bool first) {
  const double sy = s.dot(yv);
  if (!(sy > 1e-12 * s.norm() * yv.norm())) return;
  if (first) H = Matrix::Identity(s.size(), s.size()) * (sy / yv.squaredNorm());
  const double rho = 1.0 / sy;
  const Vector Hy = H * yv;
  const double yHy = yv.dot(Hy);
  H += (rho * rho * yHy + rho) * s * s.transpose() - rho * (Hy * s.transpose() + s * Hy.transpose());
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& fun, Vector x0, const BfgsOptions& opts) {
  BfgsResult r;
  r.x = std::move(x0);
  const Eigen::Index n = r.x.size();
  r.grad.resize(n);
  r.f = fun(r.x, r.grad);
  if (!std::isfinite(r.f)) throw InvalidInput("BFGS: objective is not finite at the starting point");
  Matrix H = Matrix::Identity(n, n);
  bool first = true;
  r.log.push_back({0, r.f, 0.0, r.grad.size() ? r.grad.cwiseAbs().maxCoeff() : 0.0});

  for (r.iterations = 0;; ++r.iterations) {
    const double gnorm = r.grad.size() ? r.grad.cwiseAbs().maxCoeff() : 0.0;
    if (gnorm <= opts.grad_tol) {
      r.converged = true;
      r.status = "converged";
      break;
    }
    if (r.iterations >= opts.max_iter) {
      r.hit_cap = true;
      r.status = "iteration cap";
      break;
    }
    Vector p = -H * r.grad;
    if (!(p.dot(r.grad) < 0.0)) {
      H.setIdentity();
      first = true;
      p = -r.grad;
    }
    const double a_init = first ? std::min(1.0, 1.0 / std::max(1e-300, p.cwiseAbs().maxCoeff())) : 1.0;
    Trial t;
    if (!wolfe_search(fun, r.x, r.f, r.grad, p, a_init, opts, t)) {
      if (!first) {
        H.setIdentity();
        first = true;
        continue;
      }
      r.status = "line search failed";
      break;
    }
    const Vector s = t.a * p;
    const Vector yv = t.g - r.grad;
    r.x += s;
    r.f = t.f;
    r.grad = t.g;
    bfgs_update(H, s, yv, first);
    first = false;
    r.log.push_back({r.iterations + 1, r.f, t.a, r.grad.cwiseAbs().maxCoeff()});
  }
  return r;
}

BfgsResult minimize_bfgs_bounded(const Objective& fun, Vector x0, const Vector& lower, const BfgsOptions& opts) {
  BfgsResult r;
  const Eigen::Index n = x0.size();
  if (lower.size() != n) throw InvalidInput("BFGS: bound vector has the wrong length");
  r.x = x0.cwiseMax(lower);
  r.grad.resize(n);
  r.f = fun(r.x, r.grad);
  if (!std::isfinite(r.f)) throw InvalidInput("BFGS: objective is not finite at the starting point");
  auto projected_norm = [&](const Vector& x, const Vector& g) {
    return n ? (x - (x - g).cwiseMax(lower)).cwiseAbs().maxCoeff() : 0.0;
  };
  Matrix H = Matrix::Identity(n, n);
  bool first = true;
  r.log.push_back({0, r.f, 0.0, projected_norm(r.x, r.grad)});

  for (r.iterations = 0;; ++r.iterations) {
    if (projected_norm(r.x, r.grad) <= opts.grad_tol) {
      r.converged = true;
      r.status = "converged";
      break;
    }
    if (r.iterations >= opts.max_iter) {
      r.hit_cap = true;
      r.status = "iteration cap";
      break;
    }
    std::vector<bool> frozen(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      frozen[static_cast<std::size_t>(i)] = r.x[i] <= lower[i] && r.grad[i] > 0.0;
    }
    Vector g_free = r.grad;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (frozen[static_cast<std::size_t>(i)]) g_free[i] = 0.0;
    }
    Vector p = -H * g_free;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (frozen[static_cast<std::size_t>(i)]) p[i] = 0.0;
    }
    if (!(p.dot(g_free) < 0.0)) {
      H.setIdentity();
      first = true;
      p = -g_free;
    }
    double a = first ? std::min(1.0, 1.0 / std::max(1e-300, p.cwiseAbs().maxCoeff())) : 1.0;
    bool accepted = false;
    Vector x_new, g_new(n);
    double f_new = 0.0;
    for (std::size_t k = 0; k < opts.max_line_evals; ++k, a *= 0.5) {
      x_new = (r.x + a * p).cwiseMax(lower);
      f_new = fun(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= r.f + opts.c1 * r.grad.dot(x_new - r.x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!first) {
        H.setIdentity();
        first = true;
        continue;
      }
      r.status = "line search failed";
      break;
    }
    const Vector s = x_new - r.x;
    const Vector yv = g_new - r.grad;
    r.x = x_new;
    r.f = f_new;
    r.grad = g_new;
    bfgs_update(H, s, yv, first);
    first = false;
    r.log.push_back({r.iterations + 1, r.f, a, projected_norm(r.x, r.grad)});
  }
  return r;
}

}  // namespace lupi
