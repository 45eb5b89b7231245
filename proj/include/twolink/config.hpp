#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "twolink/network.hpp"
#include "twolink/simulation.hpp"
#include "twolink/sip.hpp"
#include "twolink/thm1.hpp"

namespace twolink {

/// Serializable description of a flow profile.
///   sending:   triangular {free_flow_speed, capacity} | piecewise
///   receiving: infinite | linear {max_flow, wave_speed} | piecewise
struct ProfileConfig {
  std::string type = "infinite";
  double speed = 0.0;  // free-flow speed or wave speed, length/time
  double flow = 0.0;   // capacity or max flow, veh/time
  std::vector<Breakpoint> points;
  double saturation = 0.0;

  FlowProfile build(FlowKind kind) const;
};

struct LinkConfig {
  ProfileConfig sending;
  ProfileConfig receiving;
  double length = 1.0;
};

struct CertConfig {
  Thm1Options thm1;
  SipOptions sip;
  double throughput_tolerance = 1e-4;
};

struct ScenarioConfig {
  BufferVariant variant = BufferVariant::infinite_buffer;
  double dt = 0.1;
  std::array<LinkConfig, 3> links;  // by LinkId
  LogitRouting routing;
  double d_lo = 0.0;
  double d_hi = 0.0;
  double c_bar = 0.0;

  std::vector<double> d_lo_grid;
  std::vector<double> c_bar_grid;
  bool sweep_simulate = true;

  SimConfig sim;
  std::array<double, 3> initial_density{0.0, 0.0, 0.0};
  CertConfig cert;
  std::uint64_t seed = 0;
  std::string output_dir = "out";

  /// Spec at the base (d_lo, c_bar).
  NetworkSpec build_spec() const;
  NetworkSpec build_spec(double d_lo, double c_bar) const;
  /// Grids nonempty and ascending, values within model ranges, spec valid.
  void validate() const;
};

/// "paper-infinite" or "paper-finite"; throws std::invalid_argument otherwise.
ScenarioConfig preset(std::string_view name);
std::vector<std::string> preset_names();

/// Overlays the fields present in `j` on `base`. Unknown keys are errors.
ScenarioConfig parse_config(const nlohmann::json& j, const ScenarioConfig& base);
/// Defaults come from the preset matching the document's "variant".
ScenarioConfig parse_config(const nlohmann::json& j);
nlohmann::json serialize(const ScenarioConfig& cfg);

/// FNV-1a over the compact serialized form.
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace twolink
