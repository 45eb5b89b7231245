#include "twolink/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "twolink/quadrature.hpp"

namespace twolink {

std::string_view to_string(LyapunovFamily f) {
  switch (f) {
    case LyapunovFamily::thm1_quadratic: return "thm1_quadratic";
    case LyapunovFamily::thm2_weighted: return "thm2_weighted";
    case LyapunovFamily::test_reciprocal: return "test_reciprocal";
  }
  return "?";
}

LyapunovFamily parse_lyapunov_family(std::string_view s) {
  if (s == "thm1_quadratic") return LyapunovFamily::thm1_quadratic;
  if (s == "thm2_weighted") return LyapunovFamily::thm2_weighted;
  if (s == "test_reciprocal") return LyapunovFamily::test_reciprocal;
  throw std::invalid_argument("unknown Lyapunov family: " + std::string(s));
}

void LyapunovSpec::check(const NetworkSpec& spec) const {
  if (family == LyapunovFamily::thm1_quadratic && spec.finite())
    throw VariantError("thm1_quadratic needs the infinite-buffer variant");
  if (family == LyapunovFamily::thm2_weighted && !spec.finite())
    throw VariantError("thm2_weighted needs the finite-buffer variant");
  if (!(theta.e1 >= 0.0) || !(theta.e2 >= 0.0))
    throw std::invalid_argument("Lyapunov weights must be nonnegative");
  if (family == LyapunovFamily::test_reciprocal && !(xi2 > 0.0 && xi1 * xi2 >= 1.0))
    throw std::invalid_argument("test_reciprocal needs xi2 > 0 and xi1 xi2 >= 1");
}

double LyapunovSpec::value(const NetworkSpec& spec, const NetworkState& s) const {
  const double x0 = spec.finite() ? s.at(LinkId::e0) : 0.0;
  const double x1 = s.at(LinkId::e1), x2 = s.at(LinkId::e2);
  switch (family) {
    case LyapunovFamily::thm1_quadratic: {
      const double u = std::max(x1 - theta.e1, 0.0) + std::max(x2 - theta.e2, 0.0);
      return 0.5 * u * u;
    }
    case LyapunovFamily::thm2_weighted:
      return x0 * (0.5 * x0 + theta.e1 * x1 + theta.e2 * x2);
    case LyapunovFamily::test_reciprocal:
      return xi1 - 1.0 / (x0 + theta.e1 * x1 + theta.e2 * x2 + xi2);
  }
  return 0.0;
}

double drift(const NetworkSpec& spec, const LyapunovSpec& lyap, const NetworkState& x,
             const DriftOptions& opt) {
  lyap.check(spec);
  const double x1 = x.at(LinkId::e1), x2 = x.at(LinkId::e2);
  const DemandModel& dm = spec.demand;
  const ComplianceLaw law = spec.compliance.law_at(x1, x2);
  const double v0 = lyap.value(spec, x);
  const RouteSplit beta = spec.routing.fractions(x1, x2);

  const auto v_next = [&](double d, double c) { return lyap.value(spec, step(spec, x, d, c)); };

  // Demand kinks for fixed c: the infinite-variant densities are affine in d
  // and the quadratic family bends where they cross theta.
  const auto demand_cuts = [&](double c) {
    std::vector<double> cuts;
    if (spec.finite() || lyap.family != LyapunovFamily::thm1_quadratic) return cuts;
    const RouteSplit split = compromised_fractions(beta, c);
    const double th[2] = {lyap.theta.e1, lyap.theta.e2};
    const double share[2] = {split.e1, split.e2};
    const LinkId ids[2] = {LinkId::e1, LinkId::e2};
    for (int k = 0; k < 2; ++k) {
      const double s = spec.scale(ids[k]);
      if (share[k] <= 0.0) continue;
      cuts.push_back((th[k] - x.at(ids[k]) + s * spec.sending_at(ids[k], x.at(ids[k]))) /
                     (s * share[k]));
    }
    std::sort(cuts.begin(), cuts.end());
    return cuts;
  };

  const auto over_demand = [&](double c) {
    if (dm.degenerate()) return v_next(dm.lo, c);
    const std::vector<double> cuts = demand_cuts(c);
    return quad::integrate_pieces([&](double d) { return v_next(d, c); }, dm.lo, dm.hi, cuts,
                                  opt.nodes) /
           (dm.hi - dm.lo);
  };

  if (law.degenerate()) return over_demand(0.0) - v0;

  // Compliance kinks: capped inflows in the finite variant.
  std::vector<double> c_cuts;
  if (spec.finite()) {
    const double upstream = spec.sending_at(LinkId::e0, x.at(LinkId::e0));
    const double b = beta.e2 * upstream;
    if (b > 0.0) {
      c_cuts.push_back(spec.link(LinkId::e2).receiving.value(x2) / b);
      c_cuts.push_back((upstream - spec.link(LinkId::e1).receiving.value(x1)) / b);
    }
    std::sort(c_cuts.begin(), c_cuts.end());
  }
  const double e =
      quad::integrate_pieces([&](double c) { return over_demand(c) * law.density(c); }, 0.0,
                             law.c_max, c_cuts, opt.nodes, opt.compliance_panels);
  return e - v0;
}

}  // namespace twolink
