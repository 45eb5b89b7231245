#pragma once

#include <array>
#include <stdexcept>

#include "twolink/flow.hpp"
#include "twolink/routing.hpp"
#include "twolink/stochastic.hpp"

namespace twolink {

enum class BufferVariant { infinite_buffer, finite_buffer_with_upstream };

/// Raised when a one-step update leaves the admissible density range, which
/// only happens for a spec that skipped validate().
class DynamicsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called with a spec of the other buffer variant.
class VariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct NetworkSpec {
  BufferVariant variant = BufferVariant::infinite_buffer;
  /// Indexed by LinkId; e0 is only meaningful for the finite variant.
  std::array<LinkSpec, 3> links;
  LogitRouting routing;
  DemandModel demand;
  ComplianceModel compliance;
  double dt = 0.1;

  bool finite() const { return variant == BufferVariant::finite_buffer_with_upstream; }
  const LinkSpec& link(LinkId id) const { return links[static_cast<int>(id)]; }

  /// dt / l_e
  double scale(LinkId id) const { return dt / link(id).length; }

  /// Receiving flow seen by the split: always unbounded in the infinite variant.
  FlowBound receiving_at(LinkId id, double x) const;
  double sending_at(LinkId id, double x) const { return link(id).sending.value(x); }

  /// Throws std::invalid_argument describing the first violated invariant:
  /// link/profile sanity, e0 capacity covering e1 + e2, and the step-size
  /// condition dt (max sending slope + max receiving slope) / l <= 1.
  void validate() const;
};

struct NetworkState {
  std::array<double, 3> x{0.0, 0.0, 0.0};  // by LinkId
  double last_demand = 0.0;
  double last_compliance = 0.0;

  double at(LinkId id) const { return x[static_cast<int>(id)]; }
  double& at(LinkId id) { return x[static_cast<int>(id)]; }
};

NetworkState step_infinite(const NetworkSpec& spec, const NetworkState& state, double demand,
                           double compliance);
NetworkState step_finite(const NetworkSpec& spec, const NetworkState& state, double demand,
                         double compliance);
/// Dispatches on spec.variant.
NetworkState step(const NetworkSpec& spec, const NetworkState& state, double demand,
                  double compliance);

/// Deterministic iteration at fixed (demand, compliance); a diagnostic probe
/// for the existence of a finite fixed point, not a proof.
struct FixedPointProbe {
  NetworkState state;
  bool converged = false;
  long steps = 0;
};
FixedPointProbe probe_fixed_point(const NetworkSpec& spec, double demand, double compliance,
                                  long max_steps = 200000, double tol = 1e-12);

namespace presets {

/// Two parallel links with triangular sending flows (v = 1, 0.8; Q = 0.6, 0.4),
/// logit routing (nu = 1, 2), dt = 0.1, l = 1, demand U[d_lo, 1.2],
/// compliance U[0, c_bar], unbounded buffers.
NetworkSpec paper_infinite(double d_lo, double c_bar);

/// As above plus linear receiving flows (R = 1.2, 0.8; w = 0.5, 0.4) and an
/// upstream link e0 with v = 1, Q = 1 and an unbounded buffer.
NetworkSpec paper_finite(double d_lo, double c_bar);

}  // namespace presets

}  // namespace twolink
