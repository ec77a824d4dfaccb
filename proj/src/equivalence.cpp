#include "lupi/equivalence.hpp"

#include "lupi/kkt.hpp"
#include "lupi/serialize.hpp"
#include "lupi/simplex.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace lupi {

namespace {

void require_same_length(const Vector& a, const Vector& b, const char* what) {
  if (a.size() != b.size()) throw InvalidInput(std::string(what) + ": length mismatch");
}

const char* yes_no(bool v) { return v ? "true" : "false"; }

}  // namespace

RhoValues rho(const Vector& c, const Vector& xi) {
  require_same_length(c, xi, "rho");
  RhoValues out;
  if (c.size() == 0) return out;
  const double total = c.sum();
  const double mean = total / static_cast<double>(c.size());
  out.unnormalized = (c.array() - mean).matrix().dot(xi);
  if (total > 0.0) {
    out.normalized = out.unnormalized / total;
  } else {
    out.normalized = std::numeric_limits<double>::quiet_NaN();
    out.normalized_defined = false;
  }
  return out;
}

double rho_tolerance(const Vector& c, const Vector& xi) { return 1e-10 * (1.0 + xi.norm() * c.norm()); }

Vector weights_from_svmplus(const SvmPlusModel& model) { return model.alpha + model.beta; }

bool necessary_condition(const Vector& c, const Vector& h, double tol) {
  if (tol < 0.0) tol = rho_tolerance(c, h);
  return rho(c, h).unnormalized >= -tol;
}

PrivilegedConstruction construct_privileged(const WsvmModel& model, const Vector& c) {
  require_same_length(c, model.xi, "construct_privileged");
  if (!(c.sum() > 0.0)) throw InvalidInput("construct_privileged: weights sum to zero");
  PrivilegedConstruction out;
  out.rho = rho(c, model.xi);
  const double tol = rho_tolerance(c, model.xi);
  if (out.rho.unnormalized < -tol) {
    std::ostringstream msg;
    msg << "not representable: <c - mean(c) 1, xi> = " << format_double(out.rho.unnormalized)
        << " is negative, so no privileged features reproduce this solution";
    throw NotRepresentable(msg.str());
  }
  out.C = c.mean();
  out.gamma = std::abs(out.rho.unnormalized) <= tol ? 0.0 : out.rho.unnormalized;
  out.b_tilde = c.dot(model.xi) / c.sum();
  out.w_tilde = 1.0;
  out.features = PrivilegedSet(Matrix((model.xi.array() - out.b_tilde).matrix()));
  return out;
}

bool family_membership_fast(const Vector& candidate, const WsvmModel& model, double tol) {
  require_same_length(candidate, model.alpha, "family_membership");
  for (Eigen::Index i = 0; i < candidate.size(); ++i) {
    if (model.xi[i] > tol) {
      if (std::abs(candidate[i] - model.alpha[i]) > tol * std::max(1.0, model.alpha[i])) return false;
    } else if (candidate[i] < model.alpha[i] - tol * std::max(1.0, model.alpha[i])) {
      return false;
    }
  }
  return true;
}

bool family_membership_general(const Vector& candidate, const WsvmModel& model, double tol) {
  require_same_length(candidate, model.alpha, "family_membership");
  if ((candidate.array() < -tol).any()) return false;
  const Eigen::Index n = candidate.size();
  const Vector& y = model.y;
  const Matrix K = gram(model.kernel, model.train_x);

  // Factor K = L L' on its numerical range.
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(K);
  const Vector& ev = eig.eigenvalues();
  const double top = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (ev[i] > 1e-10 * top) keep.push_back(i);
  }
  Matrix L(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    L.col(static_cast<Eigen::Index>(k)) = eig.eigenvectors().col(keep[k]) * std::sqrt(ev[keep[k]]);
  }

  // Free variables: zero-slack points on or inside the margin. Positive-slack
  // points are pinned to mu = candidate, points beyond the margin to mu = 0.
  const Vector margin = y.cwiseProduct(model.decision);
  Vector fixed = Vector::Zero(n);
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (model.xi[i] > tol) {
      fixed[i] = candidate[i];
    } else if (margin[i] <= 1.0 + tol) {
      free.push_back(i);
    }
  }
  const auto nf = static_cast<Eigen::Index>(free.size());
  const Eigen::Index rows = L.cols() + 2;
  Matrix A(rows, nf);
  Vector target(rows);
  Matrix full(rows, n);
  full.topRows(L.cols()) = L.transpose() * y.asDiagonal();
  full.row(L.cols()) = y.transpose();
  full.row(L.cols() + 1).setOnes();
  target.head(L.cols()) = L.transpose() * model.alpha.cwiseProduct(y);
  target[L.cols()] = 0.0;
  target[L.cols() + 1] = model.alpha.sum();
  target -= full * fixed;
  Vector upper(nf);
  for (Eigen::Index k = 0; k < nf; ++k) {
    A.col(k) = full.col(free[static_cast<std::size_t>(k)]);
    upper[k] = std::max(0.0, candidate[free[static_cast<std::size_t>(k)]]);
  }
  const double scale = std::max(1.0, candidate.cwiseAbs().maxCoeff());
  return find_feasible_point(A, target, upper, std::max(tol, 1e-9) * scale).feasible;
}

bool family_membership(const Vector& candidate, const WsvmModel& model, double tol) {
  const Matrix K = gram(model.kernel, model.train_x);
  if (dual_uniqueness_condition(K, model.y)) return family_membership_fast(candidate, model, tol);
  return family_membership_general(candidate, model, tol);
}

std::string RhoZeroDiagnostic::to_text() const {
  std::ostringstream out;
  out << "applicable=" << yes_no(applicable) << '\n';
  out << "confirmed=" << yes_no(confirmed) << '\n';
  out << "condition_gap=" << format_double(condition_gap) << '\n';
  out << "w_tilde_norm=" << format_double(w_tilde_norm) << '\n';
  out << "correcting_spread=" << format_double(correcting_spread) << '\n';
  out << "weight_deviation=" << format_double(weight_deviation) << '\n';
  out << "verdict=" << verdict << '\n';
  return out.str();
}

RhoZeroDiagnostic check_rho_zero_reduction(const SvmPlusModel& model, double tol) {
  RhoZeroDiagnostic d;
  const Vector c = weights_from_svmplus(model);
  d.condition_gap = c.sum() > 0.0 ? c.dot(model.h) / c.sum() - model.h.mean() : 0.0;
  d.applicable = std::abs(d.condition_gap) <= tol;
  if (!d.applicable) {
    d.verdict = "not in equality regime";
    return d;
  }
  if (model.gamma > 0.0) {
    const Matrix Kt = gram(model.priv_kernel, model.priv_x);
    d.w_tilde_norm = std::sqrt(std::max(0.0, model.alpha_tilde.dot(Kt * model.alpha_tilde))) / model.gamma;
    d.correcting_spread = (model.xi.array() - model.b_tilde).abs().maxCoeff();
    d.confirmed = d.w_tilde_norm <= tol && d.correcting_spread <= tol;
    d.verdict = d.confirmed ? "correcting function is constant" : "correcting function is not constant";
  } else {
    d.weight_deviation = (c.array() - model.C).abs().maxCoeff();
    if (model.path == SvmPlusPath::reduced_full_rank) {
      d.confirmed = d.weight_deviation <= tol;
      d.verdict = d.confirmed ? "weights equal C" : "weights differ from C";
    } else {
      d.verdict = "privileged design is rank deficient";
    }
  }
  return d;
}

std::string EquivalenceReport::to_text() const {
  std::ostringstream out;
  out << "rho_unnormalized=" << format_double(rho.unnormalized) << '\n';
  out << "rho_normalized=" << format_double(rho.normalized) << '\n';
  out << "necessary_condition_holds=" << yes_no(necessary_condition_holds) << '\n';
  out << "representable=" << yes_no(representable) << '\n';
  if (!representable) out << "reason=" << not_representable_reason << '\n';
  if (construction) {
    out << "constructed_C=" << format_double(construction->C) << '\n';
    out << "constructed_gamma=" << format_double(construction->gamma) << '\n';
    out << "constructed_w_tilde=" << format_double(construction->w_tilde) << '\n';
    out << "constructed_b_tilde=" << format_double(construction->b_tilde) << '\n';
  }
  if (family_membership) out << "family_membership=" << yes_no(*family_membership) << '\n';
  return out.str();
}

EquivalenceReport equivalence_report(const WsvmModel& model, const Vector& c, const std::optional<Vector>& candidate,
                                     double tol) {
  EquivalenceReport r;
  r.rho = rho(c, model.xi);
  r.necessary_condition_holds = necessary_condition(c, model.h);
  try {
    r.construction = construct_privileged(model, c);
    r.representable = true;
  } catch (const NotRepresentable& e) {
    r.not_representable_reason = e.what();
  }
  if (candidate) r.family_membership = family_membership(*candidate, model, tol);
  return r;
}

}  // namespace lupi
