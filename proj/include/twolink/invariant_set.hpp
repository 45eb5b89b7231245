#pragma once

#include <stdexcept>
#include <string_view>

#include "twolink/network.hpp"

namespace twolink {

/// How the lower bound on x_e1 is defined.
///   mass_balance: (beta1(x,0) + beta2(x,0)(1 - c_bar)) f_e0(d_lo) = f_e1(x)
///   literal:      beta1(x,0) x d_lo + beta2(x,0)(1 - c_bar) d_lo = f_e1(x)
enum class LowerBoundMode { mass_balance, literal };

std::string_view to_string(LowerBoundMode m);
LowerBoundMode parse_lower_bound_mode(std::string_view s);

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// [x_e0_lo, inf) x [x_e1_lo, x_e1_hi] x [0, x_e2_hi]
struct InvariantSet {
  double x_e1_lo = 0.0;
  double x_e1_hi = 0.0;
  double x_e2_hi = 0.0;
  double x_e0_lo = 0.0;
  LowerBoundMode mode = LowerBoundMode::mass_balance;

  bool contains(const NetworkState& s, double tol = 1e-9) const;
};

/// Roots by bisection. When the low-inflow balance has no root below x_e1_hi
/// (inflow to e1 exceeds its sending flow on the whole range), x_e1_lo is
/// clipped to x_e1_hi. Throws GeometryError when x_e1_hi or x_e2_hi has no
/// root in [0, jam], VariantError for an infinite-buffer spec.
InvariantSet invariant_set(const NetworkSpec& spec,
                           LowerBoundMode mode = LowerBoundMode::mass_balance);

}  // namespace twolink
