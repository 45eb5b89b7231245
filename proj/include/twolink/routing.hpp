#pragma once

#include "twolink/flow.hpp"

namespace twolink {

/// Split of upstream traffic between the major link e1 and the minor link e2.
struct RouteSplit {
  double e1 = 0.5;
  double e2 = 0.5;
};

/// Logit routing: beta_e(x) proportional to exp(-nu_e x_e).
struct LogitRouting {
  double nu_e1 = 1.0;  // 1/density
  double nu_e2 = 2.0;

  void validate() const;

  /// Both fractions lie on the 2^-53 grid, so each one is the exact
  /// complement of the other and they sum to exactly 1.
  RouteSplit fractions(double x_e1, double x_e2) const;
};

/// Routing after non-compliance: drivers told to take e2 follow the advice with
/// probability c, the rest fall back to e1. Drivers sent to e1 always comply.
RouteSplit compromised_fractions(RouteSplit beta, double compliance);

/// min{share * upstream_flow, receiving}
double link_inflow(double share, double upstream_flow, FlowBound receiving);

}  // namespace twolink
