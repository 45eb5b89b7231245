#include <algorithm>

#include "twolink/simulation.hpp"

namespace twolink {

namespace {

double excursion(const InvariantSet& set, const NetworkState& s) {
  const double x0 = s.at(LinkId::e0), x1 = s.at(LinkId::e1), x2 = s.at(LinkId::e2);
  return std::max({set.x_e0_lo - x0, set.x_e1_lo - x1, x1 - set.x_e1_hi, -x2, x2 - set.x_e2_hi,
                   0.0});
}

NetworkState advance(const NetworkSpec& spec, const NetworkState& s, RngStream& rng) {
  const double d = sample_demand(spec.demand, rng);
  const double c = sample_compliance(spec.compliance, s.at(LinkId::e1), s.at(LinkId::e2), rng);
  return step(spec, s, d, c);
}

}  // namespace

ContainmentReport check_containment(const NetworkSpec& spec, const InvariantSet& set,
                                    int trajectories, long steps, std::uint64_t seed, double tol) {
  if (!spec.finite()) throw VariantError("containment check needs the finite-buffer variant");
  ContainmentReport rep;
  rep.trajectories = trajectories;
  rep.steps = steps;
  for (int k = 0; k < trajectories; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    NetworkState s;
    s.at(LinkId::e0) = rng.uniform(set.x_e0_lo, set.x_e0_lo + 1.0);
    s.at(LinkId::e1) = rng.uniform(set.x_e1_lo, set.x_e1_hi);
    s.at(LinkId::e2) = rng.uniform(0.0, set.x_e2_hi);
    bool left = false;
    for (long t = 0; t < steps; ++t) {
      s = advance(spec, s, rng);
      const double e = excursion(set, s);
      rep.worst_excursion = std::max(rep.worst_excursion, e);
      left = left || e > tol;
    }
    rep.exits += left ? 1 : 0;
  }
  return rep;
}

EntryReport check_entry(const NetworkSpec& spec, const InvariantSet& set, int trajectories,
                        long horizon, std::uint64_t seed, double tol) {
  if (!spec.finite()) throw VariantError("entry check needs the finite-buffer variant");
  EntryReport rep;
  rep.trajectories = trajectories;
  rep.horizon = horizon;
  const double jam1 = *spec.link(LinkId::e1).jam_density;
  const double jam2 = *spec.link(LinkId::e2).jam_density;
  for (int k = 0; k < trajectories; ++k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    NetworkState s;
    s.at(LinkId::e0) = rng.uniform(0.0, 2.0 * set.x_e0_lo + 1.0);
    s.at(LinkId::e1) = rng.uniform(0.0, jam1);
    s.at(LinkId::e2) = rng.uniform(0.0, jam2);
    long entered_at = excursion(set, s) <= tol ? 0 : -1;
    bool left = false;
    for (long t = 1; t <= horizon; ++t) {
      s = advance(spec, s, rng);
      const bool inside = excursion(set, s) <= tol;
      if (entered_at < 0 && inside) entered_at = t;
      if (entered_at >= 0 && !inside) left = true;
    }
    if (entered_at >= 0) {
      ++rep.entered;
      rep.latest_entry_step = std::max(rep.latest_entry_step, entered_at);
    }
    rep.exits_after_entry += left ? 1 : 0;
  }
  return rep;
}

}  // namespace twolink
