#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "twolink/certificate.hpp"
#include "twolink/invariant_set.hpp"
#include "twolink/network.hpp"

namespace twolink {

enum class SipDomainKind { full_box, invariant_set };

std::string_view to_string(SipDomainKind k);
SipDomainKind parse_sip_domain(std::string_view s);

struct SipOptions {
  double strictness = 1e-6;
  int constraint_grid = 65;
  int theta_grid = 17;
  int zoom_levels = 3;
  int max_exchange_rounds = 8;
  /// Subtract the grid Lipschitz bound from the margin. Off by default: the
  /// bound is reported, and exchange refinement handles the grid gap.
  bool lipschitz_safety = false;
  SipDomainKind domain = SipDomainKind::full_box;
  LowerBoundMode lower_mode = LowerBoundMode::mass_balance;
  QuadratureOptions quad{};
};

/// inf{x : f_e0(x) = Q_e0}
double critical_density(const NetworkSpec& spec);

/// alpha - sum_e (1 - theta_e) E_x[q_e(F, x, C)] - sum_e theta_e f_e(x_e),
/// with F = f_e0 at its critical density.
double sip_constraint_thm2(const NetworkSpec& spec, double alpha, ThetaPoint theta, double x_e1,
                           double x_e2, const QuadratureOptions& quad = {});
/// Same expression with F = sup f_e0.
double sip_constraint_thm3(const NetworkSpec& spec, double alpha, ThetaPoint theta, double x_e1,
                           double x_e2, const QuadratureOptions& quad = {});

/// Rectangle of (x_e1, x_e2) over which the constraint is enforced.
struct SipDomain {
  double x1_lo = 0.0, x1_hi = 0.0;
  double x2_lo = 0.0, x2_hi = 0.0;
};
SipDomain sip_domain(const NetworkSpec& spec, const SipOptions& opt);

/// Stable iff max over theta in [0,1]^2 of min over the domain of
/// (-constraint) exceeds the strictness.
Certificate thm2_certify(const NetworkSpec& spec, double alpha, const SipOptions& opt = {});
/// Unstable iff max over theta of min over the domain of the constraint is >= 0.
Certificate thm3_certify(const NetworkSpec& spec, double alpha, const SipOptions& opt = {});

class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThroughputBounds {
  double lower = 0.0;
  double upper = 0.0;
  Certificate lower_witness;
  Certificate upper_witness;
};

/// Bisection on alpha in [0, Q1 + Q2] for both certificates. Each trial alpha
/// uses demand U[max(0, 2 alpha - hi), hi], which matters for the
/// invariant-set domain. Throws ConsistencyError when lower > upper.
ThroughputBounds throughput_bounds(const NetworkSpec& spec, const SipOptions& opt = {},
                                   double tolerance = 1e-4);

}  // namespace twolink
