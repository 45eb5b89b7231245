#include "twolink/invariant_set.hpp"

#include <algorithm>
#include <functional>
#include <string>

#include <fmt/format.h>

namespace twolink {

std::string_view to_string(LowerBoundMode m) {
  return m == LowerBoundMode::literal ? "literal" : "mass_balance";
}

LowerBoundMode parse_lower_bound_mode(std::string_view s) {
  if (s == "literal") return LowerBoundMode::literal;
  if (s == "mass_balance") return LowerBoundMode::mass_balance;
  throw std::invalid_argument("unknown lower-bound mode: " + std::string(s));
}

bool InvariantSet::contains(const NetworkState& s, double tol) const {
  return s.at(LinkId::e0) >= x_e0_lo - tol && s.at(LinkId::e1) >= x_e1_lo - tol &&
         s.at(LinkId::e1) <= x_e1_hi + tol && s.at(LinkId::e2) >= -tol &&
         s.at(LinkId::e2) <= x_e2_hi + tol;
}

namespace {

// g(lo) >= 0 >= g(hi); returns the point where g changes sign.
double bisect(const std::function<double(double)>& g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Smallest sign change of g on [0, hi] from a uniform scan, refined by
// bisection. Returns hi when g stays nonnegative.
double first_crossing(const std::function<double(double)>& g, double hi, int scan = 512) {
  if (g(0.0) <= 0.0) return 0.0;
  double prev = 0.0;
  for (int i = 1; i <= scan; ++i) {
    const double x = hi * i / scan;
    if (g(x) < 0.0) return bisect(g, prev, x);
    prev = x;
  }
  return hi;
}

}  // namespace

InvariantSet invariant_set(const NetworkSpec& spec, LowerBoundMode mode) {
  if (!spec.finite()) throw VariantError("invariant_set requires the finite-buffer variant");
  const LinkSpec& e1 = spec.link(LinkId::e1);
  const LinkSpec& e2 = spec.link(LinkId::e2);
  const double jam1 = *e1.jam_density;
  const double jam2 = *e2.jam_density;
  const double c_bar = spec.compliance.c_bar();
  const double d_lo = spec.demand.lo;

  InvariantSet set;
  set.mode = mode;
  set.x_e0_lo = d_lo;

  const auto g1 = [&](double x) { return e1.receiving.value(x) - e1.sending.value(x); };
  if (g1(0.0) <= 0.0 || g1(jam1) > 0.0)
    throw GeometryError("receiving and sending flows of e1 do not cross in [0, jam]");
  set.x_e1_hi = bisect(g1, 0.0, jam1);

  const double f_crit = spec.link(LinkId::e0).sending.saturation();
  const auto g2 = [&](double x) {
    return spec.routing.fractions(set.x_e1_hi, x).e2 * f_crit * c_bar - e2.sending.value(x);
  };
  if (c_bar == 0.0) {
    set.x_e2_hi = 0.0;
  } else {
    if (g2(jam2) > 0.0)
      throw GeometryError(fmt::format("upper bound on x_e2 has no root in [0, {}]", jam2));
    set.x_e2_hi = bisect(g2, 0.0, jam2);
  }

  const double upstream_lo = spec.link(LinkId::e0).sending.value(d_lo);
  const auto g0 = [&](double x) {
    const RouteSplit b = spec.routing.fractions(x, 0.0);
    const double in = mode == LowerBoundMode::mass_balance
                          ? (b.e1 + b.e2 * (1.0 - c_bar)) * upstream_lo
                          : b.e1 * x * d_lo + b.e2 * (1.0 - c_bar) * d_lo;
    return in - e1.sending.value(x);
  };
  set.x_e1_lo = std::min(first_crossing(g0, set.x_e1_hi), set.x_e1_hi);
  return set;
}

}  // namespace twolink
