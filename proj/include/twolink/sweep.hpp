#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "twolink/config.hpp"

namespace twolink {

inline constexpr const char* kToolVersion = "0.1.0";

struct SweepRow {
  double d_lo = 0.0;
  double c_bar = 0.0;
  double alpha = 0.0;
  Verdict verdict_cert = Verdict::inconclusive;
  /// thm1, or thm2_sip / thm3_sip for whichever certificate decided the row.
  Method method = Method::thm1;
  std::optional<Verdict> verdict_sim;
  std::array<double, 3> time_avg_x{};
  double gamma_or_slack = 0.0;
  /// Finite variant: both SIP margins, reported even when inconclusive.
  double gamma_thm2 = 0.0;
  double gamma_thm3 = 0.0;
  std::string error;
  double runtime_ms = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // d_lo-major grid order
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
};

/// Runs fn(i) for i in [0, n) on `workers` threads. Exceptions are rethrown
/// after all workers finish (the one with the lowest index wins).
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Certification and (optionally) simulation at every grid point. Per-point
/// failures land in SweepRow::error. Each point simulates on stream id equal
/// to its grid index.
SweepResult sweep_region(const ScenarioConfig& cfg, int workers);

struct ThroughputRow {
  double c_bar = 0.0;
  double expected_compliance = 0.0;
  double throughput_lo = 0.0;
  double throughput_hi = 0.0;
  std::string error;
};

std::vector<ThroughputRow> throughput_curve(const ScenarioConfig& cfg, int workers);

std::string sweep_csv(const SweepResult& r);
std::string sweep_timing_csv(const SweepResult& r);
std::string throughput_csv(const std::vector<ThroughputRow>& rows);

/// {tool_version, seed, config_hash, command, config, ...extra}
nlohmann::json sidecar(const ScenarioConfig& cfg, const std::string& command,
                       const nlohmann::json& extra = nlohmann::json::object());

void write_file(const std::string& path, const std::string& content);

}  // namespace twolink
