#include "lupi/svmplus.hpp"

#include "lupi/interior_qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace lupi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Move {
  Eigen::Index var;  // < n: alpha_var, otherwise beta_{var-n}
  double coef;
};

struct GroupStats {
  double up = kInf;
  Eigen::Index up_at = -1;
  double low = -kInf;
  Eigen::Index low_at = -1;
};

Eigen::Index numeric_rank(const Matrix& Kt, double rel_tol) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(Kt, Eigen::EigenvaluesOnly);
  const Vector& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  return (ev.array() > rel_tol * top).count();
}

/// Min-norm least-squares fit of values = X w + b.
std::pair<Vector, double> fit_affine(const Matrix& X, const Vector& values) {
  Matrix A(X.rows(), X.cols() + 1);
  A << X, Vector::Ones(X.rows());
  const Vector theta = A.completeOrthogonalDecomposition().solve(values);
  return {theta.head(X.cols()), theta[X.cols()]};
}

void finish_common(SvmPlusModel& m, const Matrix& K) {
  m.alpha_tilde = (m.alpha + m.beta).array() - m.C;
  const Vector s = K * m.alpha.cwiseProduct(m.y);
  m.decision = s.array() + m.b;
  m.h = (1.0 - m.y.cwiseProduct(m.decision).array()).cwiseMax(0.0);
}

// Interior-point solution of the dual over v = (alpha, beta).
Vector interior_dual(const SvmPlusModel& m, const Matrix& K, const Matrix& Kt, double tol) {
  const Eigen::Index n = m.y.size();
  const Vector& y = m.y;
  const Matrix Kg = Kt / m.gamma;
  NonnegQp qp;
  qp.H.resize(2 * n, 2 * n);
  qp.H.topLeftCorner(n, n) = y.asDiagonal() * K * y.asDiagonal() + Kg;
  qp.H.topRightCorner(n, n) = Kg;
  qp.H.bottomLeftCorner(n, n) = Kg;
  qp.H.bottomRightCorner(n, n) = Kg;
  const Vector shift = m.C * (Kg * Vector::Ones(n));
  qp.g.resize(2 * n);
  qp.g.head(n) = -Vector::Ones(n) - shift;
  qp.g.tail(n) = -shift;
  qp.A = Matrix::Zero(2, 2 * n);
  qp.A.block(0, 0, 1, n) = y.transpose();
  qp.A.row(1).setOnes();
  qp.r = Vector::Zero(2);
  qp.r[1] = m.C * static_cast<double>(n);
  NonnegQpOptions qo;
  qo.tol = std::min(1e-12, tol);
  return solve_nonneg_qp(qp, qo).x;
}

// Zeroes tiny entries and rescales groups so both equality constraints hold
// while the zero pattern is kept.
Vector make_feasible(Vector v, const Vector& y, double C) {
  const Eigen::Index n = y.size();
  const double eps = 1e-10 * std::max(1.0, C);
  for (Eigen::Index i = 0; i < 2 * n; ++i) v[i] = v[i] < eps ? 0.0 : v[i];
  double pos = 0.0;
  double neg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) (y[i] > 0 ? pos : neg) += v[i];
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pos > neg) {
      if (y[i] > 0) v[i] *= neg / pos;
    } else if (neg > pos) {
      if (y[i] < 0) v[i] *= pos / neg;
    }
  }
  const double target = C * static_cast<double>(n);
  const double alpha_sum = v.head(n).sum();
  const double beta_sum = v.tail(n).sum();
  if (beta_sum > 0.0 && target >= alpha_sum) {
    v.tail(n) *= (target - alpha_sum) / beta_sum;
  } else if (alpha_sum > 0.0) {
    v.tail(n).setZero();
    v.head(n) *= target / alpha_sum;
  } else {
    v.tail(n).setConstant(C);
  }
  return v;
}

void solve_smo(SvmPlusModel& m, const Matrix& K, const Matrix& Kt, const SvmPlusOptions& opts, Vector v) {
  const Eigen::Index n = m.y.size();
  const Vector& y = m.y;
  const double inv_gamma = 1.0 / m.gamma;

  Vector s(n);  // K (y o alpha)
  Vector q(n);  // Kt alpha_tilde
  Vector G(2 * n);
  auto gradient = [&] {
    G.head(n) = (y.cwiseProduct(s) + q * inv_gamma).array() - 1.0;
    G.tail(n) = q * inv_gamma;
  };
  auto group_of = [&](Eigen::Index var) { return var >= n ? 2 : (y[var] > 0 ? 0 : 1); };
  auto refresh = [&] {
    s = K * v.head(n).cwiseProduct(y);
    q = Kt * ((v.head(n) + v.tail(n)).array() - m.C).matrix();
    gradient();
  };
  refresh();

  std::size_t iter = 0;
  int refreshes = 0;
  std::vector<Move> moves;
  std::array<double, 3> a_coef{};
  std::array<double, 3> e_coef{};
  std::array<Eigen::Index, 3> idx{};
  while (true) {
    std::array<GroupStats, 3> st;
    for (Eigen::Index var = 0; var < 2 * n; ++var) {
      GroupStats& g = st[group_of(var)];
      if (G[var] < g.up) {
        g.up = G[var];
        g.up_at = var;
      }
      if (v[var] > 0.0 && G[var] > g.low) {
        g.low = G[var];
        g.low_at = var;
      }
    }

    double best = 0.0;
    moves.clear();
    for (int g = 0; g < 3; ++g) {
      if (st[g].low_at >= 0 && st[g].low - st[g].up > best) {
        best = st[g].low - st[g].up;
        moves = {{st[g].up_at, 1.0}, {st[g].low_at, -1.0}};
      }
    }
    if (st[2].low_at >= 0 && st[0].up_at >= 0 && st[1].up_at >= 0) {
      const double viol = (2.0 * st[2].low - st[0].up - st[1].up) / 2.0;
      if (viol > best) {
        best = viol;
        moves = {{st[0].up_at, 1.0}, {st[1].up_at, 1.0}, {st[2].low_at, -2.0}};
      }
    }
    if (st[0].low_at >= 0 && st[1].low_at >= 0 && st[2].up_at >= 0) {
      const double viol = (st[0].low + st[1].low - 2.0 * st[2].up) / 2.0;
      if (viol > best) {
        best = viol;
        moves = {{st[0].low_at, -1.0}, {st[1].low_at, -1.0}, {st[2].up_at, 2.0}};
      }
    }
    m.violation = best;
    if (best < opts.tol) {
      const Vector old = G;
      refresh();
      const bool drifted = (old - G).cwiseAbs().maxCoeff() > 0.1 * opts.tol;
      if (drifted && refreshes++ < 5) continue;
      break;
    }
    if (iter >= opts.max_iter) {
      throw NotConverged("SVM+ solver reached the iteration cap with violation " + std::to_string(best), best);
    }
    ++iter;

    // Directional derivative, curvature and the largest feasible step.
    double slope = 0.0;
    double t_max = kInf;
    std::size_t limiting = 0;
    const std::size_t k = moves.size();
    for (std::size_t p = 0; p < k; ++p) {
      const Eigen::Index var = moves[p].var;
      const double coef = moves[p].coef;
      slope += coef * G[var];
      idx[p] = var % n;
      a_coef[p] = var < n ? coef * y[idx[p]] : 0.0;
      e_coef[p] = coef;
      if (coef < 0.0 && v[var] / -coef < t_max) {
        t_max = v[var] / -coef;
        limiting = p;
      }
    }
    double curv = 0.0;
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t r = 0; r < k; ++r) {
        curv += a_coef[p] * a_coef[r] * K(idx[p], idx[r]) + inv_gamma * e_coef[p] * e_coef[r] * Kt(idx[p], idx[r]);
      }
    }
    double t = curv > 1e-14 ? -slope / curv : kInf;
    const bool clipped = t >= t_max;
    if (clipped) t = t_max;

    for (std::size_t p = 0; p < k; ++p) {
      const Eigen::Index var = moves[p].var;
      v[var] = std::max(0.0, v[var] + t * moves[p].coef);
      if (a_coef[p] != 0.0) s += (t * a_coef[p]) * K.col(idx[p]);
      q += (t * e_coef[p]) * Kt.col(idx[p]);
    }
    if (clipped) v[moves[limiting].var] = 0.0;
    gradient();
  }

  m.iterations = iter;
  m.alpha = v.head(n);
  m.beta = v.tail(n);

  // Group multipliers from the gradients of positive variables.
  std::array<double, 3> sum{};
  std::array<Eigen::Index, 3> cnt{};
  for (Eigen::Index var = 0; var < 2 * n; ++var) {
    if (v[var] > 0.0) {
      sum[group_of(var)] += G[var];
      ++cnt[group_of(var)];
    }
  }
  auto mean = [&](int g) { return sum[g] / static_cast<double>(cnt[g]); };
  if (cnt[0] > 0 && cnt[1] > 0) {
    m.b = 0.5 * (mean(1) - mean(0));
    m.b_tilde = cnt[2] > 0 ? -mean(2) : -0.5 * (mean(0) + mean(1));
    m.b_interval = {m.b, m.b};
  } else {
    m.b_tilde = cnt[2] > 0 ? -mean(2) : 0.0;
    Interval range;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double xi = q[i] * inv_gamma + m.b_tilde;
      if (y[i] > 0) {
        range.lo = std::max(range.lo, 1.0 - xi);
      } else {
        range.hi = std::min(range.hi, xi - 1.0);
      }
    }
    m.b_interval = range;
    m.b = range.pick();
  }
  m.alpha_tilde = (m.alpha + m.beta).array() - m.C;
  if (m.priv_kernel.kind == KernelKind::linear) m.w_tilde = m.priv_x.transpose() * m.alpha_tilde * inv_gamma;
}

void solve_reduced_full_rank(SvmPlusModel& m, const Matrix& K, const SvmPlusOptions& opts) {
  WsvmOptions wo;
  wo.tol = opts.tol;
  wo.max_iter = opts.max_iter;
  const Vector c = Vector::Constant(m.y.size(), m.C);
  WsvmModel w = assemble_wsvm(K, m.y, c, solve_wsvm_dual(K, m.y, c, wo), wo);
  m.alpha = w.alpha;
  m.beta = w.beta;
  m.b = w.b;
  m.b_interval = w.b_interval;
  m.iterations = w.iterations;
  m.violation = w.violation;
  m.xi = w.xi;
}

void solve_reduced_constrained(SvmPlusModel& m, const Matrix& K, const Matrix& Kt, const SvmPlusOptions& opts) {
  const Eigen::Index n = m.y.size();
  const Vector& y = m.y;

  // Orthonormal basis of range(Kt) + span(1).
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(Kt);
  const Vector& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev[i] > opts.rank_tol * top) keep.push_back(i);
  }
  Matrix span(n, static_cast<Eigen::Index>(keep.size()) + 1);
  for (std::size_t k = 0; k < keep.size(); ++k) span.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(keep[k]);
  span.col(span.cols() - 1).setOnes();
  const Eigen::ColPivHouseholderQR<Matrix> qr(span);
  const Eigen::Index r = qr.rank();
  const Matrix B = (qr.householderQ() * Matrix::Identity(n, r));

  const Matrix Q = y.asDiagonal() * K * y.asDiagonal();
  NonnegQp qp;
  qp.H = Matrix::Zero(2 * n, 2 * n);
  qp.H.topLeftCorner(n, n) = Q;
  qp.g = Vector::Zero(2 * n);
  qp.g.head(n).setConstant(-1.0);
  qp.A = Matrix::Zero(1 + r, 2 * n);
  qp.A.block(0, 0, 1, n) = y.transpose();
  qp.A.block(1, 0, r, n) = B.transpose();
  qp.A.block(1, n, r, n) = B.transpose();
  qp.r = Vector::Zero(1 + r);
  qp.r.tail(r) = m.C * B.transpose() * Vector::Ones(n);

  NonnegQpOptions qo;
  qo.tol = std::min(1e-12, opts.tol);
  const NonnegQpSolution sol = solve_nonneg_qp(qp, qo);
  if (!sol.converged) {
    throw NotConverged("constrained reduction did not converge", std::max(sol.primal_residual, sol.dual_residual));
  }
  m.alpha = sol.x.head(n);
  m.beta = sol.x.tail(n);
  m.b = -sol.lambda[0];
  m.b_interval = {m.b, m.b};
  m.xi = (-(B * sol.lambda.tail(r))).cwiseMax(0.0);
  m.iterations = sol.iterations;
  m.violation = std::max({sol.primal_residual, sol.dual_residual, sol.mu});
}

}  // namespace

std::string to_string(SvmPlusPath path) {
  switch (path) {
    case SvmPlusPath::smo:
      return "smo";
    case SvmPlusPath::reduced_full_rank:
      return "reduced-full-rank";
    case SvmPlusPath::reduced_constrained:
      return "reduced-constrained";
  }
  return "unknown";
}

SvmPlusModel solve_svmplus(const Dataset& data, const PrivilegedSet& priv, const KernelSpec& spec,
                           const KernelSpec& priv_spec, const Matrix& K, const Matrix& Kt, double C, double gamma,
                           const SvmPlusOptions& opts) {
  require_aligned(data, priv);
  spec.validate();
  priv_spec.validate();
  const Eigen::Index n = data.size();
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidInput("C must be positive");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidInput("gamma must be nonnegative");
  if (!(opts.tol > 0.0)) throw InvalidInput("tolerance must be positive");
  if (K.rows() != n || K.cols() != n || Kt.rows() != n || Kt.cols() != n) {
    throw InvalidInput("Gram matrix size does not match the dataset");
  }

  SvmPlusModel m;
  m.kernel = spec;
  m.priv_kernel = priv_spec;
  m.train_x = data.x();
  m.priv_x = priv.x();
  m.y = data.y();
  m.C = C;
  m.gamma = gamma;

  if (gamma > 0.0) {
    m.path = SvmPlusPath::smo;
    Vector start(2 * n);
    start.head(n).setZero();
    start.tail(n).setConstant(C);
    SvmPlusOptions first = opts;
    first.max_iter = std::min(opts.max_iter, opts.fallback_after);
    try {
      solve_smo(m, K, Kt, first, start);
    } catch (const NotConverged&) {
      // The pairwise iteration can stall on ill-conditioned problems; restart
      // it from an interior-point solution.
      solve_smo(m, K, Kt, opts, make_feasible(interior_dual(m, K, Kt, opts.tol), m.y, C));
      m.iterations += first.max_iter;
    }
    m.xi = correcting_values(m, m.priv_x);
  } else {
    if (numeric_rank(Kt, opts.rank_tol) == n) {
      m.path = SvmPlusPath::reduced_full_rank;
      solve_reduced_full_rank(m, K, opts);
    } else {
      m.path = SvmPlusPath::reduced_constrained;
      solve_reduced_constrained(m, K, Kt, opts);
    }
    if (priv_spec.kind == KernelKind::linear) {
      auto [w, b] = fit_affine(m.priv_x, m.xi);
      m.w_tilde = std::move(w);
      m.b_tilde = b;
    }
  }
  finish_common(m, K);

  const Vector ya = m.coefficients();
  const double quad = ya.dot(K * ya);
  const double corr = gamma > 0.0 ? m.alpha_tilde.dot(Kt * m.alpha_tilde) / gamma : 0.0;
  m.objective_primal = 0.5 * quad + 0.5 * corr + C * m.xi.sum();
  m.objective_dual = m.alpha.sum() - 0.5 * quad - 0.5 * corr;
  return m;
}

SvmPlusModel solve_svmplus(const Dataset& data, const PrivilegedSet& priv, const KernelSpec& spec,
                           const KernelSpec& priv_spec, double C, double gamma, const SvmPlusOptions& opts) {
  require_aligned(data, priv);
  return solve_svmplus(data, priv, spec, priv_spec, gram(spec, data.x()), gram(priv_spec, priv.x()), C, gamma, opts);
}

Vector correcting_values(const SvmPlusModel& model, const Matrix& priv_points) {
  if (priv_points.cols() != model.priv_x.cols()) throw InvalidInput("correcting_values: dimension mismatch");
  if (model.gamma > 0.0) {
    const Matrix kq = gram(model.priv_kernel, priv_points, model.priv_x);
    return (kq * model.alpha_tilde / model.gamma).array() + model.b_tilde;
  }
  if (model.w_tilde) return (priv_points * *model.w_tilde).array() + model.b_tilde;
  throw InvalidInput("correcting function is only available on the training points when gamma = 0");
}

Vector predict(const SvmPlusModel& model, const Matrix& points) {
  if (points.cols() != model.train_x.cols()) throw InvalidInput("predict: feature dimension mismatch");
  const Matrix kq = gram(model.kernel, points, model.train_x);
  return (kq * model.coefficients()).array() + model.b;
}

double svmplus_dual_objective(const Matrix& K, const Matrix& Kt, const Vector& y, double C, double gamma,
                              const Vector& alpha, const Vector& beta) {
  const Vector ya = alpha.cwiseProduct(y);
  const Vector t = (alpha + beta).array() - C;
  return 0.5 * ya.dot(K * ya) - alpha.sum() + 0.5 * t.dot(Kt * t) / gamma;
}

}  // namespace lupi
