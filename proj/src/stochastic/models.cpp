#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "twolink/network.hpp"
#include "twolink/quadrature.hpp"
#include "twolink/stochastic.hpp"

namespace twolink {

DemandModel DemandModel::uniform(double lo, double hi) {
  DemandModel m{lo, hi};
  m.validate();
  return m;
}

void DemandModel::validate() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo < 0.0 || hi < lo)
    throw std::invalid_argument("demand support must satisfy 0 <= lo <= hi < inf");
}

double ComplianceLaw::density(double c) const {
  if (degenerate() || c < 0.0 || c > c_max) return 0.0;
  return (1.0 + tilt * (2.0 * c / c_max - 1.0)) / c_max;
}

double ComplianceLaw::quantile(double u) const {
  if (degenerate() || u <= 0.0) return 0.0;
  // CDF(t c_max) = (1 - k) t + k t^2; root in the cancellation-free form.
  const double a = 1.0 - tilt;
  const double t = 2.0 * u / (a + std::sqrt(a * a + 4.0 * tilt * u));
  return std::min(c_max, c_max * t);
}

ComplianceModel ComplianceModel::uniform(double c_bar) {
  ComplianceModel m;
  m.c_bar_ = c_bar;
  m.validate();
  return m;
}

ComplianceModel ComplianceModel::with_mean(ComplianceMeanFn mean) const {
  ComplianceModel m = *this;
  m.mean_fn_ = std::move(mean);
  return m;
}

void ComplianceModel::validate() const {
  if (!std::isfinite(c_bar_) || c_bar_ < 0.0 || c_bar_ > 1.0)
    throw std::invalid_argument("compliance support [0, c_bar] must lie in [0, 1]");
}

ComplianceLaw ComplianceModel::law_at(double x_e1, double x_e2) const {
  if (!mean_fn_ || c_bar_ == 0.0) return {c_bar_, 0.0};
  const double m = mean_fn_(x_e1, x_e2);
  const double tilt = 6.0 * (m / c_bar_ - 0.5);
  if (!(std::abs(tilt) <= 1.0 + 1e-12))
    throw std::domain_error("compliance mean " + std::to_string(m) +
                            " is outside [c_bar/3, 2 c_bar/3]");
  return {c_bar_, std::clamp(tilt, -1.0, 1.0)};
}

void ComplianceModel::check_monotone_mean(double x1_max, double x2_max, int grid) const {
  if (!mean_fn_) return;
  const double h1 = x1_max / (grid - 1);
  const double h2 = x2_max / (grid - 1);
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double x1 = i * h1, x2 = j * h2;
      const double m = mean_fn_(x1, x2);
      law_at(x1, x2);
      if (i + 1 < grid && mean_fn_(x1 + h1, x2) < m - 1e-12)
        throw std::invalid_argument("compliance mean decreases in x_e1 at (" + std::to_string(x1) +
                                    ", " + std::to_string(x2) + ")");
      if (j + 1 < grid && mean_fn_(x1, x2 + h2) > m + 1e-12)
        throw std::invalid_argument("compliance mean increases in x_e2 at (" + std::to_string(x1) +
                                    ", " + std::to_string(x2) + ")");
    }
  }
}

double sample_demand(const DemandModel& model, RngStream& rng) {
  return rng.uniform(model.lo, model.hi);
}

double sample_compliance(const ComplianceModel& model, double x_e1, double x_e2, RngStream& rng) {
  const ComplianceLaw law = model.law_at(x_e1, x_e2);
  const double u = rng.uniform01();
  if (law.tilt == 0.0) return law.c_max * u;
  return law.quantile(u);
}

double expected_compliance(const ComplianceModel& model, double x_e1, double x_e2) {
  return model.law_at(x_e1, x_e2).mean();
}

double expected_capped_affine(double a, double b, FlowBound r, const ComplianceLaw& law,
                              const QuadratureOptions& quad) {
  if (law.degenerate()) return r.cap(a);
  if (r.is_unbounded()) return a + b * law.mean();

  const double cap = r.value();
  const double hi = law.c_max;
  // a + b c crosses the cap at most once on [0, hi].
  double kink = -1.0;
  if (b != 0.0) kink = (cap - a) / b;

  if (law.tilt == 0.0) {
    auto piece = [&](double u, double v) {
      if (v <= u) return 0.0;
      const double mid = 0.5 * (u + v);
      if (a + b * mid >= cap) return cap * (v - u);
      return a * (v - u) + 0.5 * b * (v * v - u * u);
    };
    if (kink > 0.0 && kink < hi) return (piece(0.0, kink) + piece(kink, hi)) / hi;
    return piece(0.0, hi) / hi;
  }

  auto g = [&](double c) { return std::min(a + b * c, cap) * law.density(c); };
  if (kink > 0.0 && kink < hi) {
    return quad::integrate_doubling(g, 0.0, kink, quad.nodes, quad.tolerance, quad.max_doublings) +
           quad::integrate_doubling(g, kink, hi, quad.nodes, quad.tolerance, quad.max_doublings);
  }
  return quad::integrate_doubling(g, 0.0, hi, quad.nodes, quad.tolerance, quad.max_doublings);
}

double expected_inflow(const NetworkSpec& spec, LinkId e, double upstream_flow, double x_e1,
                       double x_e2, const QuadratureOptions& quad) {
  if (!std::isfinite(upstream_flow) || upstream_flow < 0.0)
    throw std::invalid_argument("expected_inflow needs a finite nonnegative upstream flow");
  if (e == LinkId::e0) throw std::invalid_argument("expected_inflow is defined for e1 and e2 only");
  const RouteSplit beta = spec.routing.fractions(x_e1, x_e2);
  const ComplianceLaw law = spec.compliance.law_at(x_e1, x_e2);
  const double x = e == LinkId::e1 ? x_e1 : x_e2;
  const FlowBound r = spec.receiving_at(e, x);
  // beta~_e1 = 1 - beta_e2 c, beta~_e2 = beta_e2 c
  if (e == LinkId::e1) return expected_capped_affine(upstream_flow, -beta.e2 * upstream_flow, r, law, quad);
  return expected_capped_affine(0.0, beta.e2 * upstream_flow, r, law, quad);
}

}  // namespace twolink
