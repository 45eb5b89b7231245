#include "twolink/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace twolink {

FlowBound NetworkSpec::receiving_at(LinkId id, double x) const {
  if (!finite() || id == LinkId::e0) return FlowBound::unbounded();
  return link(id).receiving.eval(x);
}

void NetworkSpec::validate() const {
  routing.validate();
  demand.validate();
  compliance.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");

  for (int i = 0; i < 3; ++i) {
    if (links[i].id != static_cast<LinkId>(i))
      throw std::invalid_argument("link slot " + std::to_string(i) + " holds the wrong link id");
  }

  auto check_step = [&](LinkId id, bool with_receiving) {
    const auto& l = link(id);
    double slope = l.sending.max_abs_slope();
    if (with_receiving) slope += l.receiving.max_abs_slope();
    if (scale(id) * slope > 1.0)
      throw std::invalid_argument("link " + std::string(to_string(id)) +
                                  ": dt * slope / length exceeds 1, one-step updates can leave "
                                  "the admissible density range");
  };

  if (!finite()) {
    check_step(LinkId::e1, false);
    check_step(LinkId::e2, false);
    return;
  }

  const auto& e0 = link(LinkId::e0);
  if (!e0.receiving.is_infinite())
    throw std::invalid_argument("link e0 must have an unbounded receiving flow");
  for (LinkId id : {LinkId::e1, LinkId::e2}) {
    if (!link(id).jam_density)
      throw std::invalid_argument("link " + std::string(to_string(id)) +
                                  " needs a finite jam density in the finite-buffer variant");
  }
  const double q0 = capacity(e0);
  const double q12 = capacity(link(LinkId::e1)) + capacity(link(LinkId::e2));
  if (q0 < q12 - 1e-12)
    throw std::invalid_argument("capacity of e0 must be at least the capacity of e1 plus e2");
  check_step(LinkId::e0, false);
  check_step(LinkId::e1, true);
  check_step(LinkId::e2, true);
}

namespace {

constexpr double kDensityTol = 1e-12;

double admit(double x, double hi, LinkId id) {
  if (!(x >= -kDensityTol) || !(x <= hi + kDensityTol)) {
    throw DynamicsError("density of link " + std::string(to_string(id)) + " left [0, " +
                        std::to_string(hi) + "]: " + std::to_string(x));
  }
  return std::clamp(x, 0.0, hi);
}

}  // namespace

NetworkState step_infinite(const NetworkSpec& spec, const NetworkState& state, double demand,
                           double compliance) {
  if (spec.finite()) throw VariantError("step_infinite needs the infinite-buffer variant");
  const double x1 = state.at(LinkId::e1);
  const double x2 = state.at(LinkId::e2);
  const auto split = compromised_fractions(spec.routing.fractions(x1, x2), compliance);

  const double q1 = link_inflow(split.e1, demand, FlowBound::unbounded());
  const double q2 = link_inflow(split.e2, demand, FlowBound::unbounded());

  NetworkState next = state;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  next.at(LinkId::e1) =
      admit(x1 + spec.scale(LinkId::e1) * (q1 - spec.sending_at(LinkId::e1, x1)), kInf, LinkId::e1);
  next.at(LinkId::e2) =
      admit(x2 + spec.scale(LinkId::e2) * (q2 - spec.sending_at(LinkId::e2, x2)), kInf, LinkId::e2);
  next.last_demand = demand;
  next.last_compliance = compliance;
  return next;
}

NetworkState step_finite(const NetworkSpec& spec, const NetworkState& state, double demand,
                         double compliance) {
  if (!spec.finite()) throw VariantError("step_finite needs the finite-buffer variant");
  const double x0 = state.at(LinkId::e0);
  const double x1 = state.at(LinkId::e1);
  const double x2 = state.at(LinkId::e2);
  const double upstream = spec.sending_at(LinkId::e0, x0);
  const auto split = compromised_fractions(spec.routing.fractions(x1, x2), compliance);

  const double q1 = link_inflow(split.e1, upstream, spec.receiving_at(LinkId::e1, x1));
  const double q2 = link_inflow(split.e2, upstream, spec.receiving_at(LinkId::e2, x2));

  NetworkState next = state;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  next.at(LinkId::e0) = admit(x0 + spec.scale(LinkId::e0) * (demand - q1 - q2), kInf, LinkId::e0);
  next.at(LinkId::e1) = admit(x1 + spec.scale(LinkId::e1) * (q1 - spec.sending_at(LinkId::e1, x1)),
                              *spec.link(LinkId::e1).jam_density, LinkId::e1);
  next.at(LinkId::e2) = admit(x2 + spec.scale(LinkId::e2) * (q2 - spec.sending_at(LinkId::e2, x2)),
                              *spec.link(LinkId::e2).jam_density, LinkId::e2);
  next.last_demand = demand;
  next.last_compliance = compliance;
  return next;
}

NetworkState step(const NetworkSpec& spec, const NetworkState& state, double demand,
                  double compliance) {
  return spec.finite() ? step_finite(spec, state, demand, compliance)
                       : step_infinite(spec, state, demand, compliance);
}

FixedPointProbe probe_fixed_point(const NetworkSpec& spec, double demand, double compliance,
                                  long max_steps, double tol) {
  FixedPointProbe probe;
  for (long t = 0; t < max_steps; ++t) {
    NetworkState next = step(spec, probe.state, demand, compliance);
    double change = 0.0;
    for (int i = 0; i < 3; ++i) change = std::max(change, std::abs(next.x[i] - probe.state.x[i]));
    probe.state = next;
    probe.steps = t + 1;
    if (change < tol) {
      probe.converged = true;
      break;
    }
  }
  return probe;
}

namespace presets {

NetworkSpec paper_infinite(double d_lo, double c_bar) {
  NetworkSpec spec;
  spec.variant = BufferVariant::infinite_buffer;
  spec.links[0] = LinkSpec::make(LinkId::e0, FlowProfile::triangular_sending(1.0, 1.0),
                                 FlowProfile::infinite_receiving(), 1.0);
  spec.links[1] = LinkSpec::make(LinkId::e1, FlowProfile::triangular_sending(1.0, 0.6),
                                 FlowProfile::infinite_receiving(), 1.0);
  spec.links[2] = LinkSpec::make(LinkId::e2, FlowProfile::triangular_sending(0.8, 0.4),
                                 FlowProfile::infinite_receiving(), 1.0);
  spec.routing = {1.0, 2.0};
  spec.demand = DemandModel::uniform(d_lo, 1.2);
  spec.compliance = ComplianceModel::uniform(c_bar);
  spec.dt = 0.1;
  return spec;
}

NetworkSpec paper_finite(double d_lo, double c_bar) {
  NetworkSpec spec = paper_infinite(d_lo, c_bar);
  spec.variant = BufferVariant::finite_buffer_with_upstream;
  spec.links[1] = LinkSpec::make(LinkId::e1, FlowProfile::triangular_sending(1.0, 0.6),
                                 FlowProfile::linear_receiving(1.2, 0.5), 1.0);
  spec.links[2] = LinkSpec::make(LinkId::e2, FlowProfile::triangular_sending(0.8, 0.4),
                                 FlowProfile::linear_receiving(0.8, 0.4), 1.0);
  return spec;
}

}  // namespace presets

}  // namespace twolink
