#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <json.hpp>

#include "twolink/certificate.hpp"
#include "twolink/invariant_set.hpp"
#include "twolink/lyapunov.hpp"
#include "twolink/network.hpp"
#include "twolink/rng.hpp"

namespace twolink {

struct SimConfig {
  long horizon = 500000;
  /// Defaults to 10% of the horizon.
  std::optional<long> burn_in;
  double divergence_cutoff = 1e6;
  int window_count = 10;
  /// Bound on |OLS slope / mean| of the last half of the window means.
  double slope_threshold = 0.01;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  /// Every k-th state goes to the trajectory sink; 0 disables it.
  long dump_every = 0;

  long effective_burn_in() const { return burn_in ? *burn_in : horizon / 10; }
  void validate() const;
};

struct TrajectoryStats {
  /// By LinkId, over the steps after burn-in.
  std::array<double, 3> time_avg_density{};
  /// Time-averaged 1-norm of the state per window of the post-burn-in steps.
  std::vector<double> window_means;
  std::array<double, 3> max_density{};
  std::array<double, 3> final_density{};
  long steps_executed = 0;
  bool diverged = false;
};

using TrajectorySink = std::function<void(long step, const NetworkState& state)>;

/// Iterates the one-step map with fresh demand and compliance draws (demand
/// first) from RngStream(cfg.seed, cfg.stream_id). Step errors are rethrown
/// as DynamicsError carrying the step index.
TrajectoryStats simulate(const NetworkSpec& spec, const NetworkState& init, const SimConfig& cfg,
                         const TrajectorySink& sink = {});

/// unstable: diverged, or every window mean exceeds the previous one and the
///           relative slope of the last half exceeds the threshold.
/// stable:   |OLS slope / mean| over the last half of the windows is below it.
Verdict classify_stability(const TrajectoryStats& stats, const SimConfig& cfg);

nlohmann::json to_json(const TrajectoryStats& stats, const SimConfig& cfg);

struct DriftEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

/// Monte Carlo estimate of E[V(next) | x] - V(x). Needs samples >= 1000.
DriftEstimate empirical_drift(const NetworkSpec& spec, const LyapunovSpec& lyap,
                              const NetworkState& x, long samples, RngStream& rng);

struct ContainmentReport {
  int trajectories = 0;
  long steps = 0;
  /// Trajectories that left the set at least once.
  int exits = 0;
  /// Largest distance outside the set seen on any step.
  double worst_excursion = 0.0;
};

/// Trajectories started uniformly inside the set (x_e0 within one unit of its
/// lower bound), checked after every step. Stream k drives trajectory k.
ContainmentReport check_containment(const NetworkSpec& spec, const InvariantSet& set,
                                    int trajectories, long steps, std::uint64_t seed,
                                    double tol = 1e-9);

struct EntryReport {
  int trajectories = 0;
  long horizon = 0;
  int entered = 0;
  /// Trajectories that left again after entering.
  int exits_after_entry = 0;
  long latest_entry_step = 0;
};

/// Trajectories started uniformly in [0, 2 x_e0_lo + 1] x [0, jam1] x [0, jam2].
EntryReport check_entry(const NetworkSpec& spec, const InvariantSet& set, int trajectories,
                        long horizon, std::uint64_t seed, double tol = 1e-9);

}  // namespace twolink
