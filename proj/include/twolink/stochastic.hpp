#pragma once

#include <functional>
#include <vector>

#include "twolink/flow.hpp"
#include "twolink/rng.hpp"

namespace twolink {

struct NetworkSpec;

/// i.i.d. demand, uniform on [lo, hi].
struct DemandModel {
  double lo = 0.0;  // veh/time
  double hi = 0.0;

  static DemandModel uniform(double lo, double hi);
  void validate() const;
  double mean() const { return 0.5 * lo + 0.5 * hi; }
  bool degenerate() const { return lo == hi; }
};

/// Conditional law of the compliance rate given the current densities.
///
/// Support is [0, c_max] with density (1 + tilt (2c/c_max - 1)) / c_max,
/// |tilt| <= 1. tilt = 0 is the uniform law; c_max = 0 is the point mass at 0.
struct ComplianceLaw {
  double c_max = 0.0;
  double tilt = 0.0;

  bool degenerate() const { return c_max == 0.0; }
  double density(double c) const;
  double mean() const { return c_max * (0.5 + tilt / 6.0); }
  /// Inverse CDF at u in [0, 1).
  double quantile(double u) const;
};

/// Maps (x_e1, x_e2) to E_x[C]. Must be nondecreasing in x_e1 and
/// nonincreasing in x_e2.
using ComplianceMeanFn = std::function<double(double, double)>;

class ComplianceModel {
 public:
  ComplianceModel() = default;
  /// State-independent uniform law on [0, c_bar].
  static ComplianceModel uniform(double c_bar);

  /// Same support, with the conditional mean steered by `mean` through the
  /// tilt of a linear density. Means must stay in [c_bar/3, 2 c_bar/3].
  ComplianceModel with_mean(ComplianceMeanFn mean) const;

  double c_bar() const { return c_bar_; }
  bool state_dependent() const { return static_cast<bool>(mean_fn_); }
  void validate() const;

  ComplianceLaw law_at(double x_e1, double x_e2) const;

  /// Finite-difference sign test of the mean hook on [0, x1_max] x [0, x2_max].
  /// Throws std::invalid_argument naming the first violating point.
  void check_monotone_mean(double x1_max, double x2_max, int grid = 41) const;

 private:
  double c_bar_ = 0.0;
  ComplianceMeanFn mean_fn_;
};

double sample_demand(const DemandModel& model, RngStream& rng);
double sample_compliance(const ComplianceModel& model, double x_e1, double x_e2, RngStream& rng);
double expected_compliance(const ComplianceModel& model, double x_e1, double x_e2);

struct QuadratureOptions {
  int nodes = 64;
  double tolerance = 1e-10;
  int max_doublings = 6;
};

/// E[min{a + b C, r}] under `law`. Exact for the uniform law; Gauss-Legendre
/// (split at the kink, doubled until converged) otherwise.
double expected_capped_affine(double a, double b, FlowBound r, const ComplianceLaw& law,
                              const QuadratureOptions& quad = {});

/// E_x[q_e^in(F, x, C)] for e in {e1, e2}. Throws std::invalid_argument for a
/// non-finite or negative upstream flow.
double expected_inflow(const NetworkSpec& spec, LinkId e, double upstream_flow, double x_e1,
                       double x_e2, const QuadratureOptions& quad = {});

}  // namespace twolink
