#include "twolink/sweep.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>

namespace twolink {

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers < 1) throw std::invalid_argument("need at least one worker");
  const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first_error;
  std::size_t first_index = n;
  const auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (i < first_index) {
          first_index = i;
          first_error = std::current_exception();
        }
      }
    }
  };
  if (w == 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (std::size_t k = 0; k < w; ++k) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

NetworkState initial_state(const ScenarioConfig& cfg) {
  NetworkState s;
  s.x = cfg.initial_density;
  if (cfg.variant == BufferVariant::infinite_buffer) s.x[0] = 0.0;
  return s;
}

void run_point(const ScenarioConfig& cfg, std::size_t index, SweepRow& row) {
  const NetworkSpec spec = cfg.build_spec(row.d_lo, row.c_bar);
  row.alpha = spec.demand.mean();
  if (spec.finite()) {
    const Certificate s = thm2_certify(spec, row.alpha, cfg.cert.sip);
    const Certificate u = thm3_certify(spec, row.alpha, cfg.cert.sip);
    row.gamma_thm2 = s.margin;
    row.gamma_thm3 = u.margin;
    const bool stable = s.verdict == Verdict::stable;
    const bool unstable = u.verdict == Verdict::unstable;
    if (stable && unstable) {
      row.verdict_cert = Verdict::inconclusive;
      row.method = Method::thm2_sip;
      row.gamma_or_slack = s.margin;
      row.error = "certificate contradiction: both stable and unstable certified";
    } else if (unstable) {
      row.verdict_cert = Verdict::unstable;
      row.method = Method::thm3_sip;
      row.gamma_or_slack = u.margin;
    } else {
      row.verdict_cert = s.verdict;
      row.method = Method::thm2_sip;
      row.gamma_or_slack = s.margin;
    }
  } else {
    const Certificate c = thm1_search(spec, row.alpha, cfg.cert.thm1);
    row.verdict_cert = c.verdict;
    row.method = Method::thm1;
    row.gamma_or_slack = c.verdict == Verdict::unstable ? -c.margin : c.margin;
  }

  if (cfg.sweep_simulate) {
    SimConfig sim = cfg.sim;
    sim.seed = cfg.seed;
    sim.stream_id = index;
    sim.dump_every = 0;
    const TrajectoryStats st = simulate(spec, initial_state(cfg), sim);
    row.verdict_sim = classify_stability(st, sim);
    row.time_avg_x = st.time_avg_density;
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else if (ch == '\n' || ch == '\r') out += ' ';
    else out += ch;
  }
  return out + "\"";
}

std::string num(double v) { return fmt::format("{:.17g}", v == 0.0 ? 0.0 : v); }

}  // namespace

SweepResult sweep_region(const ScenarioConfig& cfg, int workers) {
  cfg.validate();
  SweepResult res;
  res.seed = cfg.seed;
  res.config_hash = config_hash(cfg);
  for (double d : cfg.d_lo_grid)
    for (double c : cfg.c_bar_grid) {
      SweepRow row;
      row.d_lo = d;
      row.c_bar = c;
      res.rows.push_back(row);
    }
  parallel_for(res.rows.size(), workers, [&](std::size_t i) {
    SweepRow& row = res.rows[i];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run_point(cfg, i, row);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });
  return res;
}

std::vector<ThroughputRow> throughput_curve(const ScenarioConfig& cfg, int workers) {
  cfg.validate();
  std::vector<ThroughputRow> rows(cfg.c_bar_grid.size());
  parallel_for(rows.size(), workers, [&](std::size_t i) {
    ThroughputRow& row = rows[i];
    row.c_bar = cfg.c_bar_grid[i];
    try {
      const NetworkSpec spec = cfg.build_spec(cfg.d_lo, row.c_bar);
      row.expected_compliance = expected_compliance(spec.compliance, 0.0, 0.0);
      if (spec.finite()) {
        const ThroughputBounds b = throughput_bounds(spec, cfg.cert.sip, cfg.cert.throughput_tolerance);
        row.throughput_lo = b.lower;
        row.throughput_hi = b.upper;
      } else {
        row.throughput_lo = row.throughput_hi =
            thm1_throughput(spec, cfg.cert.thm1, cfg.cert.throughput_tolerance);
      }
    } catch (const ConsistencyError&) {
      throw;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::string sweep_csv(const SweepResult& r) {
  std::string out =
      "d_lo,c_bar,alpha,verdict_cert,method,verdict_sim,time_avg_x_e0,time_avg_x_e1,"
      "time_avg_x_e2,gamma_or_slack,gamma_thm2,gamma_thm3,error\n";
  for (const SweepRow& row : r.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", num(row.d_lo), num(row.c_bar),
                       num(row.alpha), to_string(row.verdict_cert), to_string(row.method),
                       row.verdict_sim ? to_string(*row.verdict_sim) : "skipped",
                       num(row.time_avg_x[0]), num(row.time_avg_x[1]), num(row.time_avg_x[2]),
                       num(row.gamma_or_slack), num(row.gamma_thm2), num(row.gamma_thm3),
                       csv_field(row.error));
  }
  return out;
}

std::string sweep_timing_csv(const SweepResult& r) {
  std::string out = "d_lo,c_bar,runtime_ms\n";
  for (const SweepRow& row : r.rows)
    out += fmt::format("{},{},{:.3f}\n", num(row.d_lo), num(row.c_bar), row.runtime_ms);
  return out;
}

std::string throughput_csv(const std::vector<ThroughputRow>& rows) {
  std::string out = "c_bar,expected_compliance,throughput_lo,throughput_hi,error\n";
  for (const ThroughputRow& row : rows)
    out += fmt::format("{},{},{},{},{}\n", num(row.c_bar), num(row.expected_compliance),
                       num(row.throughput_lo), num(row.throughput_hi), csv_field(row.error));
  return out;
}

nlohmann::json sidecar(const ScenarioConfig& cfg, const std::string& command,
                       const nlohmann::json& extra) {
  nlohmann::json j = extra;
  j["tool_version"] = kToolVersion;
  j["seed"] = cfg.seed;
  j["config_hash"] = fmt::format("{:016x}", config_hash(cfg));
  j["command"] = command;
  j["config"] = serialize(cfg);
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << content;
  if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace twolink
