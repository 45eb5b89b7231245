#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace twolink {

/// Upper bound on a flow that may be unbounded (the receiving flow of a link
/// with an infinite buffer). Never stored as a float infinity.
class FlowBound {
 public:
  static FlowBound unbounded() { return FlowBound{true, 0.0}; }
  static FlowBound finite(double v) { return FlowBound{false, v}; }

  bool is_unbounded() const { return unbounded_; }
  /// Throws std::logic_error for an unbounded value.
  double value() const;
  /// min{flow, *this}; short-circuits when unbounded.
  double cap(double flow) const;

  friend bool operator==(const FlowBound&, const FlowBound&) = default;

 private:
  FlowBound(bool u, double v) : unbounded_(u), value_(v) {}
  bool unbounded_;
  double value_;
};

enum class FlowKind { sending, receiving };

struct Breakpoint {
  double density;
  double flow;
  friend bool operator==(const Breakpoint&, const Breakpoint&) = default;
};

/// Piecewise-linear sending or receiving flow.
///
/// Breakpoints start at density 0 and are strictly increasing in density.
/// Past the last breakpoint a sending profile holds its saturation value and
/// a receiving profile keeps its last slope, floored at zero. A receiving
/// profile may instead be infinite (no breakpoints at all).
class FlowProfile {
 public:
  /// Validates monotonicity, f(0) = 0 and continuity with the saturation.
  static FlowProfile sending(std::vector<Breakpoint> points, double saturation);
  static FlowProfile receiving(std::vector<Breakpoint> points);
  static FlowProfile infinite_receiving();

  /// min{v x, q}
  static FlowProfile triangular_sending(double free_flow_speed, double capacity);
  /// max{R - w x, 0}
  static FlowProfile linear_receiving(double max_flow, double wave_speed);

  FlowKind kind() const { return kind_; }
  bool is_infinite() const { return infinite_; }
  std::span<const Breakpoint> breakpoints() const { return points_; }
  double saturation() const { return saturation_; }

  /// Throws std::domain_error for negative density.
  FlowBound eval(double x) const;
  /// Same as eval() but requires a finite profile.
  double value(double x) const;

  /// Largest absolute slope over all segments (0 for an infinite profile).
  double max_abs_slope() const;
  /// Density where a receiving profile first reaches zero, if it does.
  std::optional<double> zero_density() const;
  /// inf{x : f(x) = sup f} for a sending profile.
  double saturation_density() const;

  friend bool operator==(const FlowProfile&, const FlowProfile&) = default;

 private:
  FlowProfile() = default;
  double interpolate(double x) const;

  FlowKind kind_ = FlowKind::sending;
  bool infinite_ = false;
  std::vector<Breakpoint> points_;
  double saturation_ = 0.0;
};

enum class LinkId { e0 = 0, e1 = 1, e2 = 2 };

std::string_view to_string(LinkId id);

struct LinkSpec {
  LinkId id = LinkId::e1;
  FlowProfile sending = FlowProfile::triangular_sending(1.0, 1.0);
  FlowProfile receiving = FlowProfile::infinite_receiving();
  double length = 1.0;
  /// Derived from the receiving profile's zero crossing.
  std::optional<double> jam_density;

  /// Builds the link and derives the jam density. Throws std::invalid_argument.
  static LinkSpec make(LinkId id, FlowProfile sending, FlowProfile receiving,
                       double length);
};

/// sup_x min{f(x), r(x)}, exact for piecewise-linear profiles.
double capacity(const LinkSpec& link);

}  // namespace twolink
