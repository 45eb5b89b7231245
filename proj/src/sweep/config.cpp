#include "twolink/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

namespace twolink {

using nlohmann::json;

FlowProfile ProfileConfig::build(FlowKind kind) const {
  if (kind == FlowKind::sending) {
    if (type == "triangular") return FlowProfile::triangular_sending(speed, flow);
    if (type == "piecewise") return FlowProfile::sending(points, saturation);
    throw std::invalid_argument("sending profile type must be triangular or piecewise, got " + type);
  }
  if (type == "infinite") return FlowProfile::infinite_receiving();
  if (type == "linear") return FlowProfile::linear_receiving(flow, speed);
  if (type == "piecewise") return FlowProfile::receiving(points);
  throw std::invalid_argument("receiving profile type must be infinite, linear or piecewise, got " +
                              type);
}

NetworkSpec ScenarioConfig::build_spec(double lo, double cb) const {
  NetworkSpec spec;
  spec.variant = variant;
  const LinkId ids[3] = {LinkId::e0, LinkId::e1, LinkId::e2};
  for (int i = 0; i < 3; ++i)
    spec.links[i] = LinkSpec::make(ids[i], links[i].sending.build(FlowKind::sending),
                                   links[i].receiving.build(FlowKind::receiving), links[i].length);
  spec.routing = routing;
  spec.demand = DemandModel::uniform(lo, d_hi);
  spec.compliance = ComplianceModel::uniform(cb);
  spec.dt = dt;
  spec.validate();
  return spec;
}

NetworkSpec ScenarioConfig::build_spec() const { return build_spec(d_lo, c_bar); }

void ScenarioConfig::validate() const {
  const auto check_grid = [](const std::vector<double>& g, const char* name, double lo, double hi) {
    if (g.empty()) throw std::invalid_argument(fmt::format("{} is empty", name));
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!(g[i] >= lo && g[i] <= hi))
        throw std::invalid_argument(fmt::format("{} value {} outside [{}, {}]", name, g[i], lo, hi));
      if (i > 0 && !(g[i] > g[i - 1]))
        throw std::invalid_argument(fmt::format("{} must be strictly ascending", name));
    }
  };
  check_grid(d_lo_grid, "d_lo grid", 0.0, d_hi);
  check_grid(c_bar_grid, "c_bar grid", 0.0, 1.0);
  build_spec();
  sim.validate();
  if (cert.thm1.grid < 2 || cert.sip.theta_grid < 2 || cert.sip.constraint_grid < 2)
    throw std::invalid_argument("search grids need at least 2 points per axis");
  if (!(cert.thm1.strictness > 0.0) || !(cert.sip.strictness > 0.0))
    throw std::invalid_argument("strictness must be positive");
  if (!(cert.throughput_tolerance > 0.0))
    throw std::invalid_argument("throughput tolerance must be positive");
  for (double x : initial_density)
    if (!(x >= 0.0)) throw std::invalid_argument("initial densities must be nonnegative");
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) throw std::invalid_argument("linspace needs n >= 1");
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  if (n > 1) out.back() = hi;
  return out;
}

std::vector<std::string> preset_names() { return {"paper-infinite", "paper-finite"}; }

ScenarioConfig preset(std::string_view name) {
  ScenarioConfig c;
  c.dt = 0.1;
  c.links[0] = {{"triangular", 1.0, 1.0, {}, 0.0}, {"infinite", 0, 0, {}, 0}, 1.0};
  c.links[1] = {{"triangular", 1.0, 0.6, {}, 0.0}, {"infinite", 0, 0, {}, 0}, 1.0};
  c.links[2] = {{"triangular", 0.8, 0.4, {}, 0.0}, {"infinite", 0, 0, {}, 0}, 1.0};
  c.routing = {1.0, 2.0};
  c.d_hi = 1.2;
  c.c_bar = 0.79;
  c.d_lo_grid = linspace(0.0, 1.2, 21);
  c.c_bar_grid = linspace(0.0, 1.0, 21);
  if (name == "paper-infinite") {
    c.variant = BufferVariant::infinite_buffer;
    c.d_lo = 0.7;
  } else if (name == "paper-finite") {
    c.variant = BufferVariant::finite_buffer_with_upstream;
    c.d_lo = 0.3;
    c.links[1].receiving = {"linear", 0.5, 1.2, {}, 0.0};
    c.links[2].receiving = {"linear", 0.4, 0.8, {}, 0.0};
    c.cert.sip.domain = SipDomainKind::invariant_set;
  } else {
    throw std::invalid_argument("unknown preset: " + std::string(name));
  }
  return c;
}

namespace {

std::string_view variant_name(BufferVariant v) {
  return v == BufferVariant::infinite_buffer ? "infinite_buffer" : "finite_buffer_with_upstream";
}

BufferVariant parse_variant(const std::string& s) {
  if (s == "infinite_buffer") return BufferVariant::infinite_buffer;
  if (s == "finite_buffer_with_upstream") return BufferVariant::finite_buffer_with_upstream;
  throw std::invalid_argument("unknown variant: " + s);
}

// Reads known keys from an object and rejects the rest.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw std::invalid_argument(path_ + " must be an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw std::invalid_argument("unknown key " + path_ + "." + k);
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (const json* v = get(key)) {
      try {
        out = v->get<T>();
      } catch (const json::exception& e) {
        throw std::invalid_argument(fmt::format("{}.{}: {}", path_, key, e.what()));
      }
    }
  }

  std::string sub(const std::string& key) const { return path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json profile_json(const ProfileConfig& p, FlowKind kind) {
  json j;
  j["type"] = p.type;
  if (p.type == "triangular") {
    j["free_flow_speed_length_per_time"] = p.speed;
    j["capacity_veh_per_time"] = p.flow;
  } else if (p.type == "linear") {
    j["max_flow_veh_per_time"] = p.flow;
    j["wave_speed_length_per_time"] = p.speed;
  } else if (p.type == "piecewise") {
    json pts = json::array();
    for (const Breakpoint& b : p.points)
      pts.push_back({{"density_veh_per_length", b.density}, {"flow_veh_per_time", b.flow}});
    j["breakpoints"] = pts;
    if (kind == FlowKind::sending) j["saturation_veh_per_time"] = p.saturation;
  }
  return j;
}

void read_profile(const json& j, const std::string& path, ProfileConfig& p) {
  Reader r(j, path);
  std::string type = p.type;
  r.read("type", type);
  if (type != p.type) {
    p = ProfileConfig{};
    p.type = type;
  }
  r.read("free_flow_speed_length_per_time", p.speed);
  r.read("wave_speed_length_per_time", p.speed);
  r.read("capacity_veh_per_time", p.flow);
  r.read("max_flow_veh_per_time", p.flow);
  r.read("saturation_veh_per_time", p.saturation);
  if (const json* pts = r.get("breakpoints")) {
    if (!pts->is_array()) throw std::invalid_argument(path + ".breakpoints must be an array");
    p.points.clear();
    for (const json& b : *pts) {
      Breakpoint bp{};
      Reader rb(b, path + ".breakpoints[]");
      rb.read("density_veh_per_length", bp.density);
      rb.read("flow_veh_per_time", bp.flow);
      p.points.push_back(bp);
    }
  }
}

}  // namespace

json serialize(const ScenarioConfig& c) {
  json j;
  j["variant"] = variant_name(c.variant);
  j["dt_time_units"] = c.dt;
  const char* names[3] = {"e0", "e1", "e2"};
  for (int i = 0; i < 3; ++i) {
    j["links"][names[i]] = {{"length_length_units", c.links[i].length},
                            {"sending", profile_json(c.links[i].sending, FlowKind::sending)},
                            {"receiving", profile_json(c.links[i].receiving, FlowKind::receiving)}};
  }
  j["routing"] = {{"family", "logit"},
                  {"nu_e1_per_density", c.routing.nu_e1},
                  {"nu_e2_per_density", c.routing.nu_e2}};
  j["demand"] = {{"family", "uniform"}, {"lo_veh_per_time", c.d_lo}, {"hi_veh_per_time", c.d_hi}};
  j["compliance"] = {{"family", "uniform"}, {"c_bar", c.c_bar}};
  j["sweep"] = {{"d_lo_grid_veh_per_time", c.d_lo_grid},
                {"c_bar_grid", c.c_bar_grid},
                {"simulate", c.sweep_simulate}};
  json sim;
  sim["horizon_steps"] = c.sim.horizon;
  sim["burn_in_steps"] = c.sim.burn_in ? json(*c.sim.burn_in) : json();
  sim["divergence_cutoff_veh_per_length"] = c.sim.divergence_cutoff;
  sim["window_count"] = c.sim.window_count;
  sim["slope_threshold"] = c.sim.slope_threshold;
  sim["dump_every_steps"] = c.sim.dump_every;
  sim["initial_density_veh_per_length"] = c.initial_density;
  j["simulation"] = sim;
  json cert;
  cert["strictness_veh_per_time"] = c.cert.thm1.strictness;
  cert["theta_grid"] = c.cert.thm1.grid;
  cert["theta_zoom_levels"] = c.cert.thm1.zoom_levels;
  cert["theta_cap_veh_per_length"] = c.cert.thm1.theta_cap;
  cert["sip_theta_grid"] = c.cert.sip.theta_grid;
  cert["sip_zoom_levels"] = c.cert.sip.zoom_levels;
  cert["constraint_grid"] = c.cert.sip.constraint_grid;
  cert["max_exchange_rounds"] = c.cert.sip.max_exchange_rounds;
  cert["lipschitz_safety"] = c.cert.sip.lipschitz_safety;
  cert["sip_domain"] = to_string(c.cert.sip.domain);
  cert["lower_bound_mode"] = to_string(c.cert.sip.lower_mode);
  cert["quadrature_nodes"] = c.cert.sip.quad.nodes;
  cert["quadrature_tolerance"] = c.cert.sip.quad.tolerance;
  cert["throughput_tolerance_veh_per_time"] = c.cert.throughput_tolerance;
  j["certification"] = cert;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  return j;
}

ScenarioConfig parse_config(const json& j, const ScenarioConfig& base) {
  ScenarioConfig c = base;
  Reader r(j, "config");
  if (const json* v = r.get("variant")) c.variant = parse_variant(v->get<std::string>());
  r.read("dt_time_units", c.dt);

  if (const json* links = r.get("links")) {
    Reader rl(*links, "links");
    const char* names[3] = {"e0", "e1", "e2"};
    for (int i = 0; i < 3; ++i) {
      if (const json* lj = rl.get(names[i])) {
        Reader rk(*lj, rl.sub(names[i]));
        rk.read("length_length_units", c.links[i].length);
        if (const json* p = rk.get("sending"))
          read_profile(*p, rk.sub(names[i]) + ".sending", c.links[i].sending);
        if (const json* p = rk.get("receiving"))
          read_profile(*p, rk.sub(names[i]) + ".receiving", c.links[i].receiving);
      }
    }
  }
  if (const json* v = r.get("routing")) {
    Reader rr(*v, "routing");
    std::string family = "logit";
    rr.read("family", family);
    if (family != "logit") throw std::invalid_argument("routing.family must be logit");
    rr.read("nu_e1_per_density", c.routing.nu_e1);
    rr.read("nu_e2_per_density", c.routing.nu_e2);
  }
  if (const json* v = r.get("demand")) {
    Reader rd(*v, "demand");
    std::string family = "uniform";
    rd.read("family", family);
    if (family != "uniform") throw std::invalid_argument("demand.family must be uniform");
    rd.read("lo_veh_per_time", c.d_lo);
    rd.read("hi_veh_per_time", c.d_hi);
  }
  if (const json* v = r.get("compliance")) {
    Reader rc(*v, "compliance");
    std::string family = "uniform";
    rc.read("family", family);
    if (family != "uniform") throw std::invalid_argument("compliance.family must be uniform");
    rc.read("c_bar", c.c_bar);
  }
  if (const json* v = r.get("sweep")) {
    Reader rs(*v, "sweep");
    rs.read("d_lo_grid_veh_per_time", c.d_lo_grid);
    rs.read("c_bar_grid", c.c_bar_grid);
    rs.read("simulate", c.sweep_simulate);
  }
  if (const json* v = r.get("simulation")) {
    Reader rs(*v, "simulation");
    rs.read("horizon_steps", c.sim.horizon);
    if (const json* b = rs.get("burn_in_steps")) {
      if (b->is_null())
        c.sim.burn_in.reset();
      else
        c.sim.burn_in = b->get<long>();
    }
    rs.read("divergence_cutoff_veh_per_length", c.sim.divergence_cutoff);
    rs.read("window_count", c.sim.window_count);
    rs.read("slope_threshold", c.sim.slope_threshold);
    rs.read("dump_every_steps", c.sim.dump_every);
    rs.read("initial_density_veh_per_length", c.initial_density);
  }
  if (const json* v = r.get("certification")) {
    Reader rc(*v, "certification");
    rc.read("strictness_veh_per_time", c.cert.thm1.strictness);
    c.cert.sip.strictness = c.cert.thm1.strictness;
    rc.read("theta_grid", c.cert.thm1.grid);
    rc.read("theta_zoom_levels", c.cert.thm1.zoom_levels);
    rc.read("theta_cap_veh_per_length", c.cert.thm1.theta_cap);
    rc.read("sip_theta_grid", c.cert.sip.theta_grid);
    rc.read("sip_zoom_levels", c.cert.sip.zoom_levels);
    rc.read("constraint_grid", c.cert.sip.constraint_grid);
    rc.read("max_exchange_rounds", c.cert.sip.max_exchange_rounds);
    rc.read("lipschitz_safety", c.cert.sip.lipschitz_safety);
    if (const json* d = rc.get("sip_domain")) c.cert.sip.domain = parse_sip_domain(d->get<std::string>());
    if (const json* m = rc.get("lower_bound_mode"))
      c.cert.sip.lower_mode = parse_lower_bound_mode(m->get<std::string>());
    rc.read("quadrature_nodes", c.cert.sip.quad.nodes);
    rc.read("quadrature_tolerance", c.cert.sip.quad.tolerance);
    rc.read("throughput_tolerance_veh_per_time", c.cert.throughput_tolerance);
  }
  r.read("seed", c.seed);
  r.read("output_dir", c.output_dir);
  return c;
}

ScenarioConfig parse_config(const json& j) {
  std::string variant = "infinite_buffer";
  if (j.is_object() && j.contains("variant") && j["variant"].is_string())
    variant = j["variant"].get<std::string>();
  const ScenarioConfig base = preset(parse_variant(variant) == BufferVariant::infinite_buffer
                                         ? "paper-infinite"
                                         : "paper-finite");
  return parse_config(j, base);
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string s = serialize(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace twolink
