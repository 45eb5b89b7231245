#include "twolink/routing.hpp"

#include <cmath>
#include <stdexcept>

namespace twolink {

void LogitRouting::validate() const {
  if (!std::isfinite(nu_e1) || !std::isfinite(nu_e2) || nu_e1 < 0.0 || nu_e2 < 0.0)
    throw std::invalid_argument("logit routing: nu must be finite and nonnegative");
}

namespace {

constexpr double kGrid = 9007199254740992.0;  // 2^53

// Snap p in [0, 0.5] onto multiples of 2^-53; 1 - p is then exact.
double snap(double p) { return std::nearbyint(p * kGrid) / kGrid; }

}  // namespace

RouteSplit LogitRouting::fractions(double x_e1, double x_e2) const {
  // beta_e1 = 1 / (1 + exp(nu1 x1 - nu2 x2)); compute the smaller share
  // directly and take the larger as its complement.
  const double z = nu_e1 * x_e1 - nu_e2 * x_e2;
  if (z >= 0.0) {
    const double b1 = snap(1.0 / (1.0 + std::exp(z)));
    return {b1, 1.0 - b1};
  }
  const double b2 = snap(1.0 / (1.0 + std::exp(-z)));
  return {1.0 - b2, b2};
}

RouteSplit compromised_fractions(RouteSplit beta, double compliance) {
  const double e2 = beta.e2 * compliance;
  return {1.0 - e2, e2};
}

double link_inflow(double share, double upstream_flow, FlowBound receiving) {
  return receiving.cap(share * upstream_flow);
}

}  // namespace twolink
