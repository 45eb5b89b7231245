#pragma once

#include "twolink/certificate.hpp"
#include "twolink/nelder_mead.hpp"
#include "twolink/network.hpp"

namespace twolink {

struct Thm1Check {
  bool feasible = false;
  /// -max(lhs_e1, lhs_e2); feasible iff slack >= strictness.
  double slack = 0.0;
  /// (beta1 + beta2 E[1-C]) alpha - f1(theta1)
  double lhs_e1 = 0.0;
  /// beta2 E[C] alpha - f2(theta2)
  double lhs_e2 = 0.0;
};

/// Both stability inequalities at one theta. Throws VariantError for a
/// finite-buffer spec.
Thm1Check thm1_feasible(const NetworkSpec& spec, double alpha, ThetaPoint theta,
                        double strictness = 1e-6);

struct Thm1Options {
  double strictness = 1e-6;
  int grid = 17;
  int zoom_levels = 4;
  /// <= 0 selects default_theta_cap().
  double theta_cap = 0.0;
  NelderMeadOptions polish{};
};

/// Upper end of the theta box: the larger of 4x the saturation density of
/// either link and 40 / min(nu), past which the logit split no longer changes
/// in double precision.
double default_theta_cap(const NetworkSpec& spec);

/// Grid, zoom and Nelder-Mead search for a theta maximizing the slack.
Certificate thm1_search(const NetworkSpec& spec, double alpha, const Thm1Options& opt = {});

/// Largest alpha certified stable, by bisection on [0, Q1 + Q2].
double thm1_throughput(const NetworkSpec& spec, const Thm1Options& opt = {},
                       double tolerance = 1e-4);

}  // namespace twolink
