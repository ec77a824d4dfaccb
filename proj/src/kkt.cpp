#include "lupi/kkt.hpp"

#include "lupi/serialize.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lupi {

namespace {

class ReportBuilder {
 public:
  explicit ReportBuilder(double tol) { report_.tol = tol; }

  void add(std::string name, KktGroup group, double value) {
    report_.residuals.push_back({std::move(name), group, value});
  }

  KktReport finish(double primal, double dual) {
    for (const KktResidual& r : report_.residuals) {
      double* slot = nullptr;
      switch (r.group) {
        case KktGroup::stationarity:
          slot = &report_.stationarity;
          break;
        case KktGroup::primal_feasibility:
          slot = &report_.primal_feasibility;
          break;
        case KktGroup::dual_feasibility:
          slot = &report_.dual_feasibility;
          break;
        case KktGroup::complementarity:
          slot = &report_.complementarity;
          break;
      }
      *slot = std::max(*slot, r.value);
      report_.max_violation = std::max(report_.max_violation, r.value);
    }
    report_.primal = primal;
    report_.dual = dual;
    report_.gap = std::abs(primal - dual) / (1.0 + std::abs(primal));
    report_.pass = report_.max_violation <= report_.tol;
    return report_;
  }

 private:
  KktReport report_;
};

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }
double max_pos(const Vector& v) { return v.size() == 0 ? 0.0 : std::max(0.0, v.maxCoeff()); }

}  // namespace

std::string to_string(KktGroup group) {
  switch (group) {
    case KktGroup::stationarity:
      return "stationarity";
    case KktGroup::primal_feasibility:
      return "primal_feasibility";
    case KktGroup::dual_feasibility:
      return "dual_feasibility";
    case KktGroup::complementarity:
      return "complementarity";
  }
  return "unknown";
}

double KktReport::residual(const std::string& name) const {
  for (const KktResidual& r : residuals) {
    if (r.name == name) return r.value;
  }
  throw InvalidInput("unknown KKT residual: " + name);
}

std::string KktReport::to_text() const {
  std::ostringstream out;
  out << "pass=" << (pass ? "true" : "false") << '\n';
  out << "tol=" << format_double(tol) << '\n';
  out << "max_violation=" << format_double(max_violation) << '\n';
  out << "gap=" << format_double(gap) << '\n';
  out << "primal=" << format_double(primal) << '\n';
  out << "dual=" << format_double(dual) << '\n';
  out << "stationarity=" << format_double(stationarity) << '\n';
  out << "primal_feasibility=" << format_double(primal_feasibility) << '\n';
  out << "dual_feasibility=" << format_double(dual_feasibility) << '\n';
  out << "complementarity=" << format_double(complementarity) << '\n';
  for (const KktResidual& r : residuals) out << "residual." << r.name << '=' << format_double(r.value) << '\n';
  return out.str();
}

KktReport check_wsvm_kkt(const WsvmModel& m, const Matrix& K, double tol) {
  const Vector ya = m.alpha.cwiseProduct(m.y);
  const Vector Kya = K * ya;
  const Vector margin = m.y.cwiseProduct(m.decision);
  const Vector scale = m.c.cwiseMax(1.0).cwiseInverse();

  ReportBuilder rb(tol);
  rb.add("expansion", KktGroup::stationarity, max_abs(m.decision.array() - m.b - Kya.array()));
  rb.add("label_balance", KktGroup::stationarity, std::abs(m.alpha.dot(m.y)));
  rb.add("weight_split", KktGroup::stationarity, max_abs(m.alpha + m.beta - m.c));
  rb.add("margin_feasibility", KktGroup::primal_feasibility, max_pos((1.0 - m.xi.array() - margin.array()).matrix()));
  rb.add("slack_feasibility", KktGroup::primal_feasibility, max_pos(-m.xi));
  rb.add("sign_feasibility", KktGroup::dual_feasibility, std::max(max_pos(-m.alpha), max_pos(-m.beta)));
  rb.add("margin_complementarity", KktGroup::complementarity,
         max_abs(m.alpha.cwiseProduct((margin.array() - 1.0 + m.xi.array()).matrix()).cwiseProduct(scale)));
  rb.add("slack_complementarity", KktGroup::complementarity, max_abs(m.beta.cwiseProduct(m.xi).cwiseProduct(scale)));

  const double quad = ya.dot(Kya);
  return rb.finish(0.5 * quad + m.c.dot(m.xi), m.alpha.sum() - 0.5 * quad);
}

KktReport check_wsvm_kkt(const WsvmModel& m, double tol) { return check_wsvm_kkt(m, gram(m.kernel, m.train_x), tol); }

KktReport check_svmplus_kkt(const SvmPlusModel& m, const Matrix& K, const Matrix& Kt, double tol) {
  const Vector ya = m.alpha.cwiseProduct(m.y);
  const Vector Kya = K * ya;
  const Vector Ktt = Kt * m.alpha_tilde;
  const Vector margin = m.y.cwiseProduct(m.decision);
  const double scale = 1.0 / std::max(1.0, m.C);

  ReportBuilder rb(tol);
  rb.add("expansion", KktGroup::stationarity, max_abs(m.decision.array() - m.b - Kya.array()));
  rb.add("label_balance", KktGroup::stationarity, std::abs(m.alpha.dot(m.y)));
  rb.add("correcting_split", KktGroup::stationarity,
         max_abs(m.alpha_tilde - ((m.alpha + m.beta).array() - m.C).matrix()));
  rb.add("correcting_expansion", KktGroup::stationarity,
         max_abs(Ktt - m.gamma * (m.xi.array() - m.b_tilde).matrix()));
  rb.add("correcting_balance", KktGroup::stationarity, std::abs(m.alpha_tilde.sum()));
  if (m.w_tilde) {
    rb.add("correcting_form", KktGroup::stationarity,
           max_abs(m.xi - ((m.priv_x * *m.w_tilde).array() + m.b_tilde).matrix()));
  }
  rb.add("margin_feasibility", KktGroup::primal_feasibility, max_pos((1.0 - m.xi.array() - margin.array()).matrix()));
  rb.add("slack_feasibility", KktGroup::primal_feasibility, max_pos(-m.xi));
  rb.add("sign_feasibility", KktGroup::dual_feasibility, std::max(max_pos(-m.alpha), max_pos(-m.beta)));
  rb.add("margin_complementarity", KktGroup::complementarity,
         scale * max_abs(m.alpha.cwiseProduct((margin.array() - 1.0 + m.xi.array()).matrix())));
  rb.add("slack_complementarity", KktGroup::complementarity, scale * max_abs(m.beta.cwiseProduct(m.xi)));

  const double quad = ya.dot(Kya);
  const double corr = m.gamma > 0.0 ? m.alpha_tilde.dot(Ktt) / m.gamma : 0.0;
  return rb.finish(0.5 * quad + 0.5 * corr + m.C * m.xi.sum(), m.alpha.sum() - 0.5 * quad - 0.5 * corr);
}

KktReport check_svmplus_kkt(const SvmPlusModel& m, double tol) {
  return check_svmplus_kkt(m, gram(m.kernel, m.train_x), gram(m.priv_kernel, m.priv_x), tol);
}

IndexSets index_sets(const Vector& decision, const Vector& y, double tol) {
  IndexSets s;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    (y[i] > 0 ? s.plus : s.minus).push_back(i);
    const double margin = y[i] * decision[i];
    if (margin < 1.0 - tol) s.below.push_back(i);
    if (margin <= 1.0 + tol) s.at_most.push_back(i);
  }
  return s;
}

std::string OffsetUniqueness::to_text() const {
  std::ostringstream out;
  out << "unique=" << (unique ? "true" : "false") << '\n';
  out << "negative_balance=" << (negative_balance ? "true" : "false") << '\n';
  out << "positive_balance=" << (positive_balance ? "true" : "false") << '\n';
  out << "minus_below=" << format_double(minus_below) << '\n';
  out << "plus_at_most=" << format_double(plus_at_most) << '\n';
  out << "plus_below=" << format_double(plus_below) << '\n';
  out << "minus_at_most=" << format_double(minus_at_most) << '\n';
  out << "no_support_vectors=" << (no_support_vectors ? "true" : "false") << '\n';
  out << "b_lo=" << format_double(interval.lo) << '\n';
  out << "b_hi=" << format_double(interval.hi) << '\n';
  return out.str();
}

OffsetUniqueness b_uniqueness(const WsvmModel& m, double tol) {
  OffsetUniqueness u;
  const IndexSets s = index_sets(m.decision, m.y, tol);
  auto in = [](const std::vector<Eigen::Index>& set, Eigen::Index i) {
    return std::binary_search(set.begin(), set.end(), i);
  };
  for (Eigen::Index i = 0; i < m.y.size(); ++i) {
    const bool plus = m.y[i] > 0;
    if (in(s.below, i)) (plus ? u.plus_below : u.minus_below) += m.c[i];
    if (in(s.at_most, i)) (plus ? u.plus_at_most : u.minus_at_most) += m.c[i];
  }
  const double slack = tol * (1.0 + m.c.sum());
  u.negative_balance = std::abs(u.minus_below - u.plus_at_most) <= slack;
  u.positive_balance = std::abs(u.plus_below - u.minus_at_most) <= slack;
  u.no_support_vectors = !(m.alpha.array() > 0.0).any();
  u.interval = offset_interval((m.decision.array() - m.b).matrix(), m.y, m.c);
  u.unique = u.interval.width() <= tol;
  return u;
}

namespace {

Eigen::JacobiSVD<Matrix> stacked_svd(const Matrix& K, const Vector& y) {
  const Eigen::Index n = y.size();
  if (K.rows() != n || K.cols() != n) throw InvalidInput("dual uniqueness: size mismatch");
  Matrix stacked(n + 2, n);
  stacked.topRows(n) = y.asDiagonal() * K * y.asDiagonal();
  stacked.row(n).setOnes();
  stacked.row(n + 1) = y.transpose();
  return Eigen::JacobiSVD<Matrix>(stacked, Eigen::ComputeFullV);
}

Eigen::Index numeric_rank(const Vector& sv, double tol) {
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  return (sv.array() > tol * sv[0]).count();
}

}  // namespace

bool dual_uniqueness_condition(const Matrix& K, const Vector& y, double tol) {
  const Eigen::JacobiSVD<Matrix> svd = stacked_svd(K, y);
  return numeric_rank(svd.singularValues(), tol) == y.size();
}

std::optional<Vector> dual_null_direction(const Matrix& K, const Vector& y, double tol) {
  const Eigen::JacobiSVD<Matrix> svd = stacked_svd(K, y);
  const Eigen::Index n = y.size();
  if (n == 0 || numeric_rank(svd.singularValues(), tol) == n) return std::nullopt;
  return Vector(svd.matrixV().col(n - 1));
}

}  // namespace lupi
