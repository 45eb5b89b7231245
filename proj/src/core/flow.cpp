#include "twolink/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace twolink {

double FlowBound::value() const {
  if (unbounded_) throw std::logic_error("FlowBound::value on an unbounded flow");
  return value_;
}

double FlowBound::cap(double flow) const {
  if (unbounded_) return flow;
  return std::min(flow, value_);
}

namespace {

void check_points(const std::vector<Breakpoint>& points, const char* what) {
  if (points.empty()) throw std::invalid_argument(std::string(what) + ": no breakpoints");
  if (points.front().density != 0.0)
    throw std::invalid_argument(std::string(what) + ": first breakpoint must be at density 0");
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (!std::isfinite(p.density) || !std::isfinite(p.flow))
      throw std::invalid_argument(std::string(what) + ": non-finite breakpoint");
    if (p.flow < 0.0) throw std::invalid_argument(std::string(what) + ": negative flow");
    if (i > 0 && !(p.density > points[i - 1].density))
      throw std::invalid_argument(std::string(what) +
                                  ": breakpoint densities must be strictly increasing");
  }
}

}  // namespace

FlowProfile FlowProfile::sending(std::vector<Breakpoint> points, double saturation) {
  check_points(points, "sending profile");
  if (points.front().flow != 0.0)
    throw std::invalid_argument("sending profile: f(0) must be 0");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].flow < points[i - 1].flow)
      throw std::invalid_argument("sending profile: flow must be nondecreasing");
  }
  if (!std::isfinite(saturation) || saturation != points.back().flow)
    throw std::invalid_argument("sending profile: saturation must equal the last breakpoint flow");
  FlowProfile p;
  p.kind_ = FlowKind::sending;
  p.points_ = std::move(points);
  p.saturation_ = saturation;
  return p;
}

FlowProfile FlowProfile::receiving(std::vector<Breakpoint> points) {
  check_points(points, "receiving profile");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].flow > points[i - 1].flow)
      throw std::invalid_argument("receiving profile: flow must be nonincreasing");
  }
  FlowProfile p;
  p.kind_ = FlowKind::receiving;
  p.saturation_ = points.front().flow;
  p.points_ = std::move(points);
  return p;
}

FlowProfile FlowProfile::infinite_receiving() {
  FlowProfile p;
  p.kind_ = FlowKind::receiving;
  p.infinite_ = true;
  return p;
}

FlowProfile FlowProfile::triangular_sending(double free_flow_speed, double capacity) {
  if (!(free_flow_speed > 0.0) || !(capacity > 0.0) || !std::isfinite(free_flow_speed) ||
      !std::isfinite(capacity))
    throw std::invalid_argument("triangular sending: speed and capacity must be positive");
  return sending({{0.0, 0.0}, {capacity / free_flow_speed, capacity}}, capacity);
}

FlowProfile FlowProfile::linear_receiving(double max_flow, double wave_speed) {
  if (!(max_flow > 0.0) || !(wave_speed > 0.0) || !std::isfinite(max_flow) ||
      !std::isfinite(wave_speed))
    throw std::invalid_argument("linear receiving: max flow and wave speed must be positive");
  return receiving({{0.0, max_flow}, {max_flow / wave_speed, 0.0}});
}

double FlowProfile::interpolate(double x) const {
  const auto& pts = points_;
  auto it = std::upper_bound(pts.begin(), pts.end(), x,
                             [](double v, const Breakpoint& b) { return v < b.density; });
  if (it == pts.end()) {
    if (kind_ == FlowKind::sending) return saturation_;
    if (pts.size() == 1) return pts.back().flow;
    const auto& a = pts[pts.size() - 2];
    const auto& b = pts.back();
    const double slope = (b.flow - a.flow) / (b.density - a.density);
    return std::max(0.0, b.flow + slope * (x - b.density));
  }
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double t = (x - a.density) / (b.density - a.density);
  return a.flow + t * (b.flow - a.flow);
}

FlowBound FlowProfile::eval(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("flow profile evaluated at negative density");
  if (infinite_) return FlowBound::unbounded();
  return FlowBound::finite(interpolate(x));
}

double FlowProfile::value(double x) const { return eval(x).value(); }

double FlowProfile::max_abs_slope() const {
  double m = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double s = (points_[i].flow - points_[i - 1].flow) /
                     (points_[i].density - points_[i - 1].density);
    m = std::max(m, std::abs(s));
  }
  return m;
}

std::optional<double> FlowProfile::zero_density() const {
  if (kind_ != FlowKind::receiving || infinite_) return std::nullopt;
  for (const auto& p : points_) {
    if (p.flow == 0.0) return p.density;
  }
  if (points_.size() < 2) return std::nullopt;
  const auto& a = points_[points_.size() - 2];
  const auto& b = points_.back();
  const double slope = (b.flow - a.flow) / (b.density - a.density);
  if (slope >= 0.0) return std::nullopt;
  return b.density + b.flow / (-slope);
}

double FlowProfile::saturation_density() const {
  if (kind_ != FlowKind::sending) throw std::logic_error("saturation_density on a receiving profile");
  for (const auto& p : points_) {
    if (p.flow >= saturation_) return p.density;
  }
  return points_.back().density;
}

std::string_view to_string(LinkId id) {
  switch (id) {
    case LinkId::e0: return "e0";
    case LinkId::e1: return "e1";
    case LinkId::e2: return "e2";
  }
  return "?";
}

LinkSpec LinkSpec::make(LinkId id, FlowProfile sending, FlowProfile receiving, double length) {
  if (sending.kind() != FlowKind::sending)
    throw std::invalid_argument("link " + std::string(to_string(id)) + ": sending profile has wrong kind");
  if (receiving.kind() != FlowKind::receiving)
    throw std::invalid_argument("link " + std::string(to_string(id)) + ": receiving profile has wrong kind");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("link " + std::string(to_string(id)) + ": length must be positive");
  LinkSpec link;
  link.id = id;
  link.jam_density = receiving.zero_density();
  link.sending = std::move(sending);
  link.receiving = std::move(receiving);
  link.length = length;
  return link;
}

double capacity(const LinkSpec& link) {
  const auto& f = link.sending;
  const auto& r = link.receiving;
  if (r.is_infinite()) return f.saturation();

  std::vector<double> xs;
  for (const auto& p : f.breakpoints()) xs.push_back(p.density);
  for (const auto& p : r.breakpoints()) xs.push_back(p.density);
  if (auto z = r.zero_density()) xs.push_back(*z);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  auto h = [&](double x) { return std::min(f.value(x), r.value(x)); };
  double best = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    best = std::max(best, h(xs[i]));
    if (i + 1 == xs.size()) break;
    // Both profiles are affine on [a, b]; the crossing of f and r is a candidate.
    const double a = xs[i], b = xs[i + 1];
    const double da = f.value(a) - r.value(a);
    const double db = f.value(b) - r.value(b);
    if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
      const double xc = a + da / (da - db) * (b - a);
      best = std::max(best, h(xc));
    }
  }
  return best;
}

}  // namespace twolink
