#include "twolink/thm1.hpp"

#include "theta_search.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace twolink {

Thm1Check thm1_feasible(const NetworkSpec& spec, double alpha, ThetaPoint theta,
                        double strictness) {
  if (spec.finite()) throw VariantError("thm1 requires the infinite-buffer variant");
  const RouteSplit beta = spec.routing.fractions(theta.e1, theta.e2);
  const double ec = expected_compliance(spec.compliance, theta.e1, theta.e2);
  Thm1Check r;
  r.lhs_e1 = (beta.e1 + beta.e2 * (1.0 - ec)) * alpha - spec.sending_at(LinkId::e1, theta.e1);
  r.lhs_e2 = beta.e2 * ec * alpha - spec.sending_at(LinkId::e2, theta.e2);
  r.slack = -std::max(r.lhs_e1, r.lhs_e2);
  r.feasible = r.slack >= strictness;
  return r;
}

double default_theta_cap(const NetworkSpec& spec) {
  const double sat = std::max(spec.link(LinkId::e1).sending.saturation_density(),
                              spec.link(LinkId::e2).sending.saturation_density());
  const double nu = std::min(spec.routing.nu_e1, spec.routing.nu_e2);
  double cap = 4.0 * sat;
  if (nu > 0.0) cap = std::max(cap, 40.0 / nu);
  return cap;
}

Certificate thm1_search(const NetworkSpec& spec, double alpha, const Thm1Options& opt) {
  if (spec.finite()) throw VariantError("thm1 requires the infinite-buffer variant");
  if (opt.grid < 2) throw std::invalid_argument("thm1 grid needs at least 2 points per axis");
  const double cap = opt.theta_cap > 0.0 ? opt.theta_cap : default_theta_cap(spec);

  const auto slack = [&](std::array<double, 2> t) {
    return thm1_feasible(spec, alpha, {t[0], t[1]}, opt.strictness).slack;
  };
  const detail::ThetaSearchResult found = detail::maximize_on_box(
      slack, Box<2>{{0.0, 0.0}, {cap, cap}}, {opt.grid, opt.zoom_levels, 4, opt.polish});
  const detail::ThetaSample& best = found.best;

  Certificate c;
  c.method = Method::thm1;
  c.alpha = alpha;
  c.tolerance = opt.strictness;
  c.grid = opt.grid;
  c.witness = ThetaPoint{best.p[0], best.p[1]};
  if (best.value >= opt.strictness) {
    c.verdict = Verdict::stable;
    c.margin = best.value;
  } else if (best.value <= -opt.strictness) {
    c.verdict = Verdict::unstable;
    c.margin = -best.value;
    if (found.last_zoom_gain > 1e-4)
      c.note = fmt::format("last zoom level still gained {:.3g}; resolution-limited",
                           found.last_zoom_gain);
  } else {
    c.verdict = Verdict::inconclusive;
    c.margin = best.value;
    c.note = fmt::format("marginal: best slack {:.3g} within strictness {:.3g}", best.value,
                         opt.strictness);
  }
  return c;
}

double thm1_throughput(const NetworkSpec& spec, const Thm1Options& opt, double tolerance) {
  if (spec.finite()) throw VariantError("thm1 requires the infinite-buffer variant");
  double lo = 0.0;
  double hi = capacity(spec.link(LinkId::e1)) + capacity(spec.link(LinkId::e2));
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (thm1_search(spec, mid, opt).verdict == Verdict::stable)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

}  // namespace twolink
