// twolink: certificates, sweeps and simulations for the two-link network.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "twolink/config.hpp"
#include "twolink/lyapunov.hpp"
#include "twolink/sweep.hpp"

namespace fs = std::filesystem;
using namespace twolink;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  std::optional<double> d_lo;
  std::optional<double> c_bar;
};

ScenarioConfig load(const Common& o) {
  ScenarioConfig cfg;
  if (!o.preset_name.empty()) cfg = preset(o.preset_name);
  if (!o.config_path.empty()) {
    std::ifstream f(o.config_path);
    if (!f) throw UsageError("cannot read config " + o.config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
      throw UsageError(fmt::format("{}: {}", o.config_path, e.what()));
    }
    cfg = o.preset_name.empty() ? parse_config(j) : parse_config(j, cfg);
  } else if (o.preset_name.empty()) {
    throw UsageError("one of --config or --preset is required");
  }
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.d_lo) cfg.d_lo = *o.d_lo;
  if (o.c_bar) cfg.c_bar = *o.c_bar;
  if (o.workers < 1) throw UsageError("--workers must be >= 1");
  return cfg;
}

std::string out_path(const ScenarioConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  return (fs::path(cfg.output_dir) / name).string();
}

int cmd_certify(const Common& o, const std::string& mode, std::optional<double> alpha_opt) {
  const ScenarioConfig cfg = load(o);
  const NetworkSpec spec = cfg.build_spec();
  const double alpha = alpha_opt ? *alpha_opt : spec.demand.mean();
  if (!(alpha >= 0.0)) throw UsageError("--alpha must be nonnegative");
  if ((mode == "thm1") == spec.finite())
    throw UsageError(fmt::format("mode {} does not apply to the {} variant", mode,
                                 spec.finite() ? "finite-buffer" : "infinite-buffer"));
  Certificate c;
  if (mode == "thm1")
    c = thm1_search(spec, alpha, cfg.cert.thm1);
  else if (mode == "thm2")
    c = thm2_certify(spec, alpha, cfg.cert.sip);
  else
    c = thm3_certify(spec, alpha, cfg.cert.sip);
  const nlohmann::json cj = to_json(c);
  std::cout << cj.dump(2) << "\n";
  write_file(out_path(cfg, "certificate.json"),
             sidecar(cfg, "certify", {{"mode", mode}, {"certificate", cj}}).dump(2) + "\n");
  return 0;
}

int cmd_sweep(const Common& o, bool timing) {
  const ScenarioConfig cfg = load(o);
  const SweepResult r = sweep_region(cfg, o.workers);
  write_file(out_path(cfg, "sweep_region.csv"), sweep_csv(r));
  int failed = 0, stable = 0, unstable = 0;
  for (const SweepRow& row : r.rows) {
    failed += row.error.empty() ? 0 : 1;
    stable += row.verdict_cert == Verdict::stable ? 1 : 0;
    unstable += row.verdict_cert == Verdict::unstable ? 1 : 0;
  }
  write_file(out_path(cfg, "sweep_region.json"),
             sidecar(cfg, "sweep-region",
                     {{"rows", r.rows.size()},
                      {"certified_stable", stable},
                      {"certified_unstable", unstable},
                      {"rows_with_errors", failed}})
                     .dump(2) +
                 "\n");
  if (timing) write_file(out_path(cfg, "sweep_region_timing.csv"), sweep_timing_csv(r));
  fmt::print("{} points: {} certified stable, {} certified unstable, {} with errors\n",
             r.rows.size(), stable, unstable, failed);
  return 0;
}

int cmd_throughput(const Common& o) {
  const ScenarioConfig cfg = load(o);
  const auto rows = throughput_curve(cfg, o.workers);
  const std::string csv = throughput_csv(rows);
  write_file(out_path(cfg, "throughput_curve.csv"), csv);
  write_file(out_path(cfg, "throughput_curve.json"),
             sidecar(cfg, "throughput-curve", {{"rows", rows.size()}}).dump(2) + "\n");
  std::cout << csv;
  for (const ThroughputRow& row : rows)
    if (!row.error.empty()) return 1;
  return 0;
}

nlohmann::json set_json(const InvariantSet& s) {
  return {{"mode", to_string(s.mode)},
          {"x_e0_lo", s.x_e0_lo},
          {"x_e1_lo", s.x_e1_lo},
          {"x_e1_hi", s.x_e1_hi},
          {"x_e2_hi", s.x_e2_hi}};
}

int cmd_invariant_set(const Common& o, std::optional<std::string> mode_opt, bool compare,
                      bool containment) {
  ScenarioConfig cfg = load(o);
  if (mode_opt) cfg.cert.sip.lower_mode = parse_lower_bound_mode(*mode_opt);
  const NetworkSpec spec = cfg.build_spec();
  if (!spec.finite()) throw UsageError("invariant-set needs the finite-buffer variant");

  nlohmann::json out;
  const InvariantSet set = invariant_set(spec, cfg.cert.sip.lower_mode);
  out["invariant_set"] = set_json(set);
  fmt::print("mode={} x_e1_lo={:.12g} x_e1_hi={:.12g} x_e2_hi={:.12g} x_e0_lo={:.12g}\n",
             to_string(set.mode), set.x_e1_lo, set.x_e1_hi, set.x_e2_hi, set.x_e0_lo);
  if (compare) {
    nlohmann::json both = nlohmann::json::array();
    for (LowerBoundMode m : {LowerBoundMode::mass_balance, LowerBoundMode::literal}) {
      const InvariantSet s = invariant_set(spec, m);
      both.push_back(set_json(s));
      fmt::print("compare mode={} x_e1_lo={:.12g} x_e1_hi={:.12g} x_e2_hi={:.12g}\n",
                 to_string(m), s.x_e1_lo, s.x_e1_hi, s.x_e2_hi);
    }
    out["compare"] = both;
  }
  int code = 0;
  if (containment) {
    const ContainmentReport rep = check_containment(spec, set, 100, 10000, cfg.seed);
    out["containment"] = {{"trajectories", rep.trajectories},
                          {"steps", rep.steps},
                          {"exits", rep.exits},
                          {"worst_excursion", rep.worst_excursion}};
    fmt::print("containment: {} of {} trajectories left the set (worst excursion {:.3g})\n",
               rep.exits, rep.trajectories, rep.worst_excursion);
    if (rep.exits > 0) code = 1;
  }
  write_file(out_path(cfg, "invariant_set.json"), sidecar(cfg, "invariant-set", out).dump(2) + "\n");
  return code;
}

int cmd_simulate(const Common& o, std::optional<long> horizon, std::optional<long> dump_every) {
  ScenarioConfig cfg = load(o);
  if (horizon) cfg.sim.horizon = *horizon;
  if (dump_every) cfg.sim.dump_every = *dump_every;
  const NetworkSpec spec = cfg.build_spec();
  SimConfig sim = cfg.sim;
  sim.seed = cfg.seed;
  sim.stream_id = 0;
  NetworkState init;
  init.x = cfg.initial_density;
  if (!spec.finite()) init.x[0] = 0.0;

  std::string traj;
  TrajectorySink sink;
  if (sim.dump_every > 0) {
    traj = "step,x_e0,x_e1,x_e2\n";
    sink = [&](long t, const NetworkState& s) {
      traj += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", t, s.x[0], s.x[1], s.x[2]);
    };
  }
  const TrajectoryStats st = simulate(spec, init, sim, sink);
  nlohmann::json extra = to_json(st, sim);
  extra["alpha"] = spec.demand.mean();
  write_file(out_path(cfg, "trajectory_stats.json"),
             sidecar(cfg, "simulate", {{"stats", extra}}).dump(2) + "\n");
  if (sim.dump_every > 0) write_file(out_path(cfg, "trajectory.csv"), traj);
  fmt::print("verdict={} steps={} diverged={} time_avg=({:.6g}, {:.6g}, {:.6g})\n",
             to_string(classify_stability(st, sim)), st.steps_executed, st.diverged,
             st.time_avg_density[0], st.time_avg_density[1], st.time_avg_density[2]);
  return 0;
}

void add_common(CLI::App* sub, Common& o) {
  sub->add_option("--config", o.config_path, "Scenario JSON");
  sub->add_option("--preset", o.preset_name, "Built-in scenario")
      ->check(CLI::IsMember(preset_names()));
  sub->add_option("--seed", o.seed, "Random seed");
  sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--d-lo", o.d_lo, "Demand lower bound (veh/time)");
  sub->add_option("--c-bar", o.c_bar, "Compliance upper bound");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability certificates, throughput and simulation for a two-link network"};
  app.require_subcommand(1);
  Common common;

  auto* certify = app.add_subcommand("certify", "Certify stability or instability at one point");
  std::string mode = "thm1";
  std::optional<double> alpha;
  add_common(certify, common);
  certify->add_option("--mode", mode, "thm1 | thm2 | thm3")
      ->check(CLI::IsMember({"thm1", "thm2", "thm3"}));
  certify->add_option("--alpha", alpha, "Mean demand (veh/time); defaults to the demand mean");

  auto* sweep = app.add_subcommand("sweep-region", "Certify and simulate over the (d_lo, c_bar) grid");
  bool timing = false;
  add_common(sweep, common);
  sweep->add_flag("--timing", timing, "Also write per-point runtimes");

  auto* curve = app.add_subcommand("throughput-curve", "Throughput (or bounds) per c_bar");
  add_common(curve, common);

  auto* inv = app.add_subcommand("invariant-set", "Bounds of the invariant set");
  std::optional<std::string> lb_mode;
  bool compare = false, containment = false;
  add_common(inv, common);
  inv->add_option("--lower-bound-mode", lb_mode, "mass_balance | literal")
      ->check(CLI::IsMember({"mass_balance", "literal"}));
  inv->add_flag("--compare", compare, "Report both lower-bound modes");
  inv->add_flag("--check-containment", containment, "Run 100 trajectories inside the set");

  auto* sim = app.add_subcommand("simulate", "One trajectory at the base point");
  std::optional<long> horizon, dump_every;
  add_common(sim, common);
  sim->add_option("--horizon", horizon, "Steps");
  sim->add_option("--dump-every", dump_every, "Write every k-th state to trajectory.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*certify) return cmd_certify(common, mode, alpha);
    if (*sweep) return cmd_sweep(common, timing);
    if (*curve) return cmd_throughput(common);
    if (*inv) return cmd_invariant_set(common, lb_mode, compare, containment);
    if (*sim) return cmd_simulate(common, horizon, dump_every);
  } catch (const UsageError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const VariantError& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    fmt::print(stderr, "usage error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
  return 2;
}
