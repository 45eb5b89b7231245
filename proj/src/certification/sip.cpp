#include "twolink/sip.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "theta_search.hpp"
#include "twolink/kernels.hpp"

namespace twolink {

std::string_view to_string(SipDomainKind k) {
  return k == SipDomainKind::invariant_set ? "invariant_set" : "full_box";
}

SipDomainKind parse_sip_domain(std::string_view s) {
  if (s == "full_box") return SipDomainKind::full_box;
  if (s == "invariant_set") return SipDomainKind::invariant_set;
  throw std::invalid_argument("unknown SIP domain: " + std::string(s));
}

double critical_density(const NetworkSpec& spec) {
  return spec.link(LinkId::e0).sending.saturation_density();
}

namespace {

void require_finite(const NetworkSpec& spec, const char* what) {
  if (!spec.finite()) throw VariantError(std::string(what) + " requires the finite-buffer variant");
}

// G(theta, x) = a + theta1 b1 + theta2 b2 with
//   a  = E[q1] + E[q2],  b_e = f_e(x_e) - E[q_e].
struct Columns {
  double a, b1, b2;
};

Columns columns_at(const NetworkSpec& spec, double upstream, double x1, double x2,
                   const QuadratureOptions& quad) {
  const double q1 = expected_inflow(spec, LinkId::e1, upstream, x1, x2, quad);
  const double q2 = expected_inflow(spec, LinkId::e2, upstream, x1, x2, quad);
  return {q1 + q2, spec.sending_at(LinkId::e1, x1) - q1, spec.sending_at(LinkId::e2, x2) - q2};
}

// Same operation order as the envelope kernels.
double affine(const Columns& c, double t1, double t2) { return (c.a + t1 * c.b1) + t2 * c.b2; }

double constraint(const NetworkSpec& spec, double upstream, double alpha, ThetaPoint theta,
                  double x1, double x2, const QuadratureOptions& quad) {
  return alpha - affine(columns_at(spec, upstream, x1, x2, quad), theta.e1, theta.e2);
}

struct Table {
  std::vector<double> a, b1, b2;
  std::vector<std::array<double, 2>> points;

  void add(const Columns& c, double x1, double x2) {
    a.push_back(c.a);
    b1.push_back(c.b1);
    b2.push_back(c.b2);
    points.push_back({x1, x2});
  }
  kernels::AffineTable view() const { return {a, b1, b2}; }
  Columns at(std::size_t k) const { return {a[k], b1[k], b2[k]}; }
};

// Stability looks at the smallest G over the domain, instability at the largest.
enum class Side { lower, upper };

struct SipProblem {
  const NetworkSpec& spec;
  double alpha;
  double upstream;
  Side side;
  const SipOptions& opt;
  Method method;
};

Certificate solve(const SipProblem& pb) {
  const NetworkSpec& spec = pb.spec;
  const SipOptions& opt = pb.opt;
  if (opt.constraint_grid < 2) throw std::invalid_argument("constraint grid needs >= 2 points");
  const SipDomain dom = sip_domain(spec, opt);

  const int n1 = dom.x1_hi > dom.x1_lo ? opt.constraint_grid : 1;
  const int n2 = dom.x2_hi > dom.x2_lo ? opt.constraint_grid : 1;
  const double h1 = n1 > 1 ? (dom.x1_hi - dom.x1_lo) / (n1 - 1) : 0.0;
  const double h2 = n2 > 1 ? (dom.x2_hi - dom.x2_lo) / (n2 - 1) : 0.0;

  Table table;
  for (int i = 0; i < n1; ++i) {
    const double x1 = i + 1 == n1 && n1 > 1 ? dom.x1_hi : dom.x1_lo + i * h1;
    for (int j = 0; j < n2; ++j) {
      const double x2 = j + 1 == n2 && n2 > 1 ? dom.x2_hi : dom.x2_lo + j * h2;
      table.add(columns_at(spec, pb.upstream, x1, x2, opt.quad), x1, x2);
    }
  }

  // Lipschitz constants of G in x: routing sensitivity nu/4 on both inflows,
  // plus the receiving and sending slopes of the link itself.
  const double c_scale = spec.compliance.state_dependent() ? 1.0 : spec.compliance.c_bar();
  const double l1 = 2.0 * pb.upstream * spec.routing.nu_e1 / 4.0 * c_scale +
                    spec.link(LinkId::e1).receiving.max_abs_slope() +
                    spec.link(LinkId::e1).sending.max_abs_slope();
  const double l2 = 2.0 * pb.upstream * spec.routing.nu_e2 / 4.0 * c_scale +
                    spec.link(LinkId::e2).receiving.max_abs_slope() +
                    spec.link(LinkId::e2).sending.max_abs_slope();
  const double lip = 0.5 * (l1 * h1 + l2 * h2);

  const auto envelope = [&](double t1, double t2) {
    return pb.side == Side::lower ? kernels::lower_envelope(table.view(), t1, t2)
                                  : kernels::upper_envelope(table.view(), t1, t2);
  };
  // Margin in favor of the verdict for a fixed theta.
  const auto gamma = [&](std::array<double, 2> t) {
    const double g = envelope(t[0], t[1]).value;
    return pb.side == Side::lower ? g - pb.alpha : pb.alpha - g;
  };

  const detail::ThetaSearchOptions search{opt.theta_grid, opt.zoom_levels, 4, {}};
  const Box<2> theta_box{{0.0, 0.0}, {1.0, 1.0}};
  const Box<2> x_box{{dom.x1_lo, dom.x2_lo}, {dom.x1_hi, dom.x2_hi}};

  detail::ThetaSearchResult found = detail::maximize_on_box(gamma, theta_box, search);
  int rounds = 0;
  for (; rounds < opt.max_exchange_rounds; ++rounds) {
    const double t1 = found.best.p[0], t2 = found.best.p[1];
    const double sign = pb.side == Side::lower ? 1.0 : -1.0;
    // Extremal grid points at the current theta, most binding first.
    std::vector<std::size_t> order(table.a.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto key = [&](std::size_t k) { return sign * affine(table.at(k), t1, t2); };
    const std::size_t starts = std::min<std::size_t>(4, order.size());
    std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double ka = key(a), kb = key(b);
                        return ka < kb || (ka == kb && a < b);
                      });
    const double grid_extreme = key(order[0]);

    bool added = false;
    for (std::size_t s = 0; s < starts; ++s) {
      const auto p0 = table.points[order[s]];
      const auto nm = nelder_mead_minimize<2>(
          [&](std::array<double, 2> x) {
            return sign * affine(columns_at(spec, pb.upstream, x[0], x[1], opt.quad), t1, t2);
          },
          p0, {std::max(h1, 1e-9), std::max(h2, 1e-9)}, x_box,
          {200, 1e-14, 1e-10});
      if (nm.value < grid_extreme - 1e-9) {
        table.add(columns_at(spec, pb.upstream, nm.point[0], nm.point[1], opt.quad), nm.point[0],
                  nm.point[1]);
        added = true;
      }
    }
    if (!added) break;
    found = detail::maximize_on_box(gamma, theta_box, search);
  }

  const double t1 = found.best.p[0], t2 = found.best.p[1];
  const kernels::Extremum ext = envelope(t1, t2);

  Certificate c;
  c.method = pb.method;
  c.alpha = pb.alpha;
  c.tolerance = opt.strictness;
  c.grid = opt.constraint_grid;
  c.witness = ThetaPoint{t1, t2};
  c.worst_point = table.points[ext.index];
  c.exchange_rounds = rounds;
  c.lipschitz_bound = lip;
  c.margin = found.best.value - (opt.lipschitz_safety ? lip : 0.0);
  if (pb.side == Side::lower) {
    c.verdict = c.margin > opt.strictness ? Verdict::stable : Verdict::inconclusive;
  } else {
    c.verdict = c.margin >= 0.0 ? Verdict::unstable : Verdict::inconclusive;
    c.note = "instability requires gamma >= 0 (non-negative)";
  }
  return c;
}

}  // namespace

double sip_constraint_thm2(const NetworkSpec& spec, double alpha, ThetaPoint theta, double x_e1,
                           double x_e2, const QuadratureOptions& quad) {
  require_finite(spec, "sip_constraint_thm2");
  const double upstream = spec.sending_at(LinkId::e0, critical_density(spec));
  return constraint(spec, upstream, alpha, theta, x_e1, x_e2, quad);
}

double sip_constraint_thm3(const NetworkSpec& spec, double alpha, ThetaPoint theta, double x_e1,
                           double x_e2, const QuadratureOptions& quad) {
  require_finite(spec, "sip_constraint_thm3");
  const double upstream = spec.link(LinkId::e0).sending.saturation();
  return constraint(spec, upstream, alpha, theta, x_e1, x_e2, quad);
}

SipDomain sip_domain(const NetworkSpec& spec, const SipOptions& opt) {
  require_finite(spec, "sip_domain");
  if (opt.domain == SipDomainKind::invariant_set) {
    const InvariantSet set = invariant_set(spec, opt.lower_mode);
    return {set.x_e1_lo, set.x_e1_hi, 0.0, set.x_e2_hi};
  }
  return {0.0, *spec.link(LinkId::e1).jam_density, 0.0, *spec.link(LinkId::e2).jam_density};
}

Certificate thm2_certify(const NetworkSpec& spec, double alpha, const SipOptions& opt) {
  require_finite(spec, "thm2_certify");
  const double upstream = spec.sending_at(LinkId::e0, critical_density(spec));
  return solve({spec, alpha, upstream, Side::lower, opt, Method::thm2_sip});
}

Certificate thm3_certify(const NetworkSpec& spec, double alpha, const SipOptions& opt) {
  require_finite(spec, "thm3_certify");
  const double upstream = spec.link(LinkId::e0).sending.saturation();
  return solve({spec, alpha, upstream, Side::upper, opt, Method::thm3_sip});
}

ThroughputBounds throughput_bounds(const NetworkSpec& spec, const SipOptions& opt,
                                   double tolerance) {
  require_finite(spec, "throughput_bounds");
  const double cap = capacity(spec.link(LinkId::e1)) + capacity(spec.link(LinkId::e2));
  const double d_hi = spec.demand.hi;
  const auto at = [&](double alpha) {
    NetworkSpec s = spec;
    s.demand = DemandModel::uniform(std::clamp(2.0 * alpha - d_hi, 0.0, d_hi), d_hi);
    return s;
  };

  ThroughputBounds out;
  double lo = 0.0, hi = cap;
  out.lower_witness = thm2_certify(at(lo), lo, opt);
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    Certificate c = thm2_certify(at(mid), mid, opt);
    if (c.verdict == Verdict::stable) {
      lo = mid;
      out.lower_witness = std::move(c);
    } else {
      hi = mid;
    }
  }
  out.lower = lo;

  lo = 0.0;
  hi = cap;
  out.upper_witness = thm3_certify(at(hi), hi, opt);
  if (out.upper_witness.verdict != Verdict::unstable)
    out.upper_witness.note = "not certified unstable even at the capacity bound";
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    Certificate c = thm3_certify(at(mid), mid, opt);
    if (c.verdict == Verdict::unstable) {
      hi = mid;
      out.upper_witness = std::move(c);
    } else {
      lo = mid;
    }
  }
  out.upper = hi;

  if (out.lower > out.upper + tolerance)
    throw ConsistencyError(fmt::format(
        "throughput lower bound {} exceeds upper bound {}; stable witness {}, unstable witness {}",
        out.lower, out.upper, to_json(out.lower_witness).dump(), to_json(out.upper_witness).dump()));
  return out;
}

}  // namespace twolink
