#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "twolink/kernels.hpp"
#include "twolink/simulation.hpp"

namespace twolink {

void SimConfig::validate() const {
  const long b = effective_burn_in();
  if (!(horizon > b && b >= 0)) throw std::invalid_argument("need horizon > burn_in >= 0");
  if (window_count < 2) throw std::invalid_argument("need window_count >= 2");
  if (horizon - b < window_count)
    throw std::invalid_argument("fewer post-burn-in steps than windows");
  if (!(divergence_cutoff > 0.0)) throw std::invalid_argument("divergence cutoff must be positive");
  if (!(slope_threshold > 0.0)) throw std::invalid_argument("slope threshold must be positive");
  if (dump_every < 0) throw std::invalid_argument("dump_every must be >= 0");
}

TrajectoryStats simulate(const NetworkSpec& spec, const NetworkState& init, const SimConfig& cfg,
                         const TrajectorySink& sink) {
  cfg.validate();
  const long burn = cfg.effective_burn_in();
  const long measured = cfg.horizon - burn;
  const long window_len = measured / cfg.window_count;

  RngStream rng(cfg.seed, cfg.stream_id);
  NetworkState x = init;
  TrajectoryStats st;
  st.max_density = x.x;
  std::array<double, 3> sum{};
  double window_sum = 0.0;
  long window_steps = 0;
  const bool dump = sink && cfg.dump_every > 0;
  if (dump) sink(0, x);

  for (long t = 1; t <= cfg.horizon; ++t) {
    const double d = sample_demand(spec.demand, rng);
    const double c = sample_compliance(spec.compliance, x.at(LinkId::e1), x.at(LinkId::e2), rng);
    try {
      x = step(spec, x, d, c);
    } catch (const DynamicsError& e) {
      throw DynamicsError(fmt::format("step {}: {}", t, e.what()));
    }
    st.steps_executed = t;
    for (int i = 0; i < 3; ++i) st.max_density[i] = std::max(st.max_density[i], x.x[i]);
    if (dump && t % cfg.dump_every == 0) sink(t, x);
    if (std::max({x.x[0], x.x[1], x.x[2]}) > cfg.divergence_cutoff) {
      st.diverged = true;
      break;
    }
    if (t <= burn) continue;

    for (int i = 0; i < 3; ++i) sum[i] += x.x[i];
    window_sum += (x.x[0] + x.x[1]) + x.x[2];
    ++window_steps;
    const bool last_window = static_cast<long>(st.window_means.size()) + 1 == cfg.window_count;
    if ((!last_window && window_steps == window_len) || t == cfg.horizon) {
      st.window_means.push_back(window_sum / static_cast<double>(window_steps));
      window_sum = 0.0;
      window_steps = 0;
    }
  }

  const long counted = std::max(0L, st.steps_executed - burn);
  if (counted > 0)
    for (int i = 0; i < 3; ++i) st.time_avg_density[i] = sum[i] / static_cast<double>(counted);
  st.final_density = x.x;
  return st;
}

Verdict classify_stability(const TrajectoryStats& stats, const SimConfig& cfg) {
  if (stats.diverged) return Verdict::unstable;
  const std::size_t n = stats.window_means.size();
  if (n < 2) return Verdict::inconclusive;

  const std::size_t first = n / 2;
  const std::size_t m = n - first;
  if (m < 2) return Verdict::inconclusive;
  double mk = 0.0, mv = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    mk += static_cast<double>(k);
    mv += stats.window_means[k];
  }
  mk /= static_cast<double>(m);
  mv /= static_cast<double>(m);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = first; k < n; ++k) {
    const double dk = static_cast<double>(k) - mk;
    sxy += dk * (stats.window_means[k] - mv);
    sxx += dk * dk;
  }
  const double slope = sxy / sxx;
  if (mv <= 0.0) return slope <= 0.0 ? Verdict::stable : Verdict::inconclusive;
  const double rel = slope / mv;
  if (std::abs(rel) < cfg.slope_threshold) return Verdict::stable;

  bool increasing = true;
  for (std::size_t k = 1; k < n; ++k)
    increasing = increasing && stats.window_means[k] > stats.window_means[k - 1];
  if (increasing && rel > cfg.slope_threshold) return Verdict::unstable;
  return Verdict::inconclusive;
}

nlohmann::json to_json(const TrajectoryStats& stats, const SimConfig& cfg) {
  nlohmann::json j;
  j["time_avg_density"] = stats.time_avg_density;
  j["window_means"] = stats.window_means;
  j["max_density"] = stats.max_density;
  j["final_density"] = stats.final_density;
  j["steps_executed"] = stats.steps_executed;
  j["diverged"] = stats.diverged;
  j["verdict"] = to_string(classify_stability(stats, cfg));
  j["horizon"] = cfg.horizon;
  j["burn_in"] = cfg.effective_burn_in();
  j["window_count"] = cfg.window_count;
  j["slope_threshold"] = cfg.slope_threshold;
  j["divergence_cutoff"] = cfg.divergence_cutoff;
  j["seed"] = cfg.seed;
  j["stream_id"] = cfg.stream_id;
  return j;
}

DriftEstimate empirical_drift(const NetworkSpec& spec, const LyapunovSpec& lyap,
                              const NetworkState& x, long samples, RngStream& rng) {
  if (samples < 1000) throw std::invalid_argument("empirical_drift needs at least 1000 samples");
  lyap.check(spec);
  const double v0 = lyap.value(spec, x);
  const double x1 = x.at(LinkId::e1), x2 = x.at(LinkId::e2);

  constexpr long kChunk = 8192;
  std::vector<double> buf;
  buf.reserve(kChunk);
  double shift = 0.0;
  double sum = 0.0, sum_sq = 0.0;
  for (long done = 0; done < samples;) {
    buf.clear();
    const long n = std::min(kChunk, samples - done);
    for (long i = 0; i < n; ++i) {
      const double d = sample_demand(spec.demand, rng);
      const double c = sample_compliance(spec.compliance, x1, x2, rng);
      buf.push_back(lyap.value(spec, step(spec, x, d, c)) - v0);
    }
    if (done == 0) shift = buf.front();
    const kernels::Moments mo = kernels::shifted_moments(buf, shift);
    sum += mo.sum;
    sum_sq += mo.sum_sq;
    done += n;
  }
  const double nd = static_cast<double>(samples);
  const double mean_shifted = sum / nd;
  const double var = std::max(0.0, (sum_sq - sum * mean_shifted) / (nd - 1.0));
  return {shift + mean_shifted, std::sqrt(var / nd), samples};
}

}  // namespace twolink
