#ifndef LUPI_EQUIVALENCE_HPP_
#define LUPI_EQUIVALENCE_HPP_

#include "lupi/svmplus.hpp"
#include "lupi/wsvm.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace lupi {

/// No correcting space reproduces the given WSVM solution.
class NotRepresentable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RhoValues {
  double unnormalized = 0.0;  ///< <c - mean(c) 1, xi>
  double normalized = 0.0;    ///< unnormalized / sum(c)
  bool normalized_defined = true;
};

RhoValues rho(const Vector& c, const Vector& xi);

/// Absolute tolerance for sign decisions on the unnormalized statistic.
double rho_tolerance(const Vector& c, const Vector& xi);

/// c = alpha + beta.
Vector weights_from_svmplus(const SvmPlusModel& model);

/// <c - mean(c) 1, h> >= -tol; a negative tol selects rho_tolerance(c, h).
bool necessary_condition(const Vector& c, const Vector& h, double tol = -1.0);

/// One-dimensional privileged problem whose SVM+ solution is a given WSVM solution.
struct PrivilegedConstruction {
  double C = 0.0;
  double gamma = 0.0;
  PrivilegedSet features;
  double w_tilde = 1.0;
  double b_tilde = 0.0;
  RhoValues rho;
};

/**
 * C = mean(c), gamma = rho, x~_i = xi_i - b~ with b~ = <c, xi> / <c, 1>.
 * gamma is set to 0 when |rho| is within tolerance. Throws NotRepresentable
 * when rho is negative.
 */
PrivilegedConstruction construct_privileged(const WsvmModel& model, const Vector& c);

/// Membership test for the family of weights sharing the model's primal solution.
/// Uses the closed form when the dual solution is unique, otherwise the LP.
bool family_membership(const Vector& candidate, const WsvmModel& model, double tol = 1e-8);
bool family_membership_fast(const Vector& candidate, const WsvmModel& model, double tol = 1e-8);
bool family_membership_general(const Vector& candidate, const WsvmModel& model, double tol = 1e-8);

struct RhoZeroDiagnostic {
  bool applicable = false;
  bool confirmed = false;
  double condition_gap = 0.0;      ///< weighted minus plain mean hinge loss
  double w_tilde_norm = 0.0;       ///< correcting-space norm (gamma > 0)
  double correcting_spread = 0.0;  ///< max |xi_i - b~| (gamma > 0)
  double weight_deviation = 0.0;   ///< max |alpha_i + beta_i - C| (gamma = 0)
  std::string verdict;

  std::string to_text() const;
};

RhoZeroDiagnostic check_rho_zero_reduction(const SvmPlusModel& model, double tol);

struct EquivalenceReport {
  RhoValues rho;
  bool necessary_condition_holds = false;
  bool representable = false;
  std::string not_representable_reason;
  std::optional<PrivilegedConstruction> construction;
  std::optional<bool> family_membership;

  std::string to_text() const;
};

EquivalenceReport equivalence_report(const WsvmModel& model, const Vector& c,
                                     const std::optional<Vector>& candidate = std::nullopt, double tol = 1e-8);

}  // namespace lupi

#endif  // LUPI_EQUIVALENCE_HPP_
