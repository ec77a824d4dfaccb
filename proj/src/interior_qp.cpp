#include "lupi/interior_qp.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace lupi {

namespace {

double max_step(const Vector& v, const Vector& dv) {
  double step = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv[i] < 0.0) step = std::min(step, -v[i] / dv[i]);
  }
  return step;
}

}  // namespace

NonnegQpSolution solve_nonneg_qp(const NonnegQp& qp, const NonnegQpOptions& opts) {
  const Eigen::Index n = qp.g.size();
  const Eigen::Index m = qp.r.size();
  if (qp.H.rows() != n || qp.H.cols() != n || qp.A.rows() != m || qp.A.cols() != n) {
    throw InvalidInput("interior QP: inconsistent problem dimensions");
  }

  const double scale = std::max({1.0, qp.r.cwiseAbs().maxCoeff() / std::max<double>(1.0, static_cast<double>(n)),
                                 qp.g.cwiseAbs().maxCoeff()});
  NonnegQpSolution s;
  s.x = Vector::Constant(n, scale);
  s.z = Vector::Constant(n, scale);
  s.lambda = Vector::Zero(m);

  const double r_norm = 1.0 + qp.r.cwiseAbs().maxCoeff();
  const double g_norm = 1.0 + qp.g.cwiseAbs().maxCoeff();
  Matrix kkt(n + m, n + m);
  Vector rhs(n + m);

  for (s.iterations = 0; s.iterations < opts.max_iter; ++s.iterations) {
    const Vector rd = qp.H * s.x + qp.g - qp.A.transpose() * s.lambda - s.z;
    const Vector rp = qp.A * s.x - qp.r;
    s.mu = s.x.dot(s.z) / static_cast<double>(n);
    s.primal_residual = rp.cwiseAbs().maxCoeff() / r_norm;
    s.dual_residual = rd.cwiseAbs().maxCoeff() / g_norm;
    if (s.primal_residual <= opts.tol && s.dual_residual <= opts.tol && s.mu <= opts.tol * std::max(1.0, scale)) {
      s.converged = true;
      break;
    }

    kkt.setZero();
    kkt.topLeftCorner(n, n) = qp.H;
    kkt.topLeftCorner(n, n).diagonal().array() += s.z.array() / s.x.array();
    kkt.topRightCorner(n, m) = -qp.A.transpose();
    kkt.bottomLeftCorner(m, n) = qp.A;
    const Eigen::PartialPivLU<Matrix> lu(kkt);

    auto solve = [&](const Vector& rc, Vector& dx, Vector& dl, Vector& dz) {
      rhs.head(n) = -rd - (rc.array() / s.x.array()).matrix();
      rhs.tail(m) = -rp;
      const Vector sol = lu.solve(rhs);
      dx = sol.head(n);
      dl = sol.tail(m);
      dz = -((rc.array() + s.z.array() * dx.array()) / s.x.array()).matrix();
    };

    Vector dx, dl, dz;
    const Vector rc_aff = s.x.cwiseProduct(s.z);
    solve(rc_aff, dx, dl, dz);
    const double a_aff = std::min(max_step(s.x, dx), max_step(s.z, dz));
    const double mu_aff = (s.x + a_aff * dx).dot(s.z + a_aff * dz) / static_cast<double>(n);
    const double sigma = std::pow(mu_aff / s.mu, 3);

    const Vector rc = (rc_aff.array() + dx.array() * dz.array() - sigma * s.mu).matrix();
    solve(rc, dx, dl, dz);
    const double step = std::min(1.0, 0.995 * std::min(max_step(s.x, dx), max_step(s.z, dz)));
    s.x += step * dx;
    s.lambda += step * dl;
    s.z += step * dz;
  }
  return s;
}

}  // namespace lupi
