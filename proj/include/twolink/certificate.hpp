#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace twolink {

enum class Verdict { stable, unstable, inconclusive };
enum class Method { thm1, thm2_sip, thm3_sip, monte_carlo };

std::string_view to_string(Verdict v);
std::string_view to_string(Method m);
Verdict parse_verdict(std::string_view s);

struct ThetaPoint {
  double e1 = 0.0;  // density
  double e2 = 0.0;
};

struct Certificate {
  Verdict verdict = Verdict::inconclusive;
  Method method = Method::thm1;
  /// Best weight vector found; always present for stable/unstable verdicts.
  std::optional<ThetaPoint> witness;
  /// Flow units: Theorem-1 slack, or the SIP margin gamma.
  double margin = 0.0;
  double alpha = 0.0;
  double tolerance = 0.0;

  // Diagnostics.
  int grid = 0;
  std::optional<std::array<double, 2>> worst_point;
  int exchange_rounds = 0;
  /// Bound on how far the continuum extremum can lie past the grid extremum.
  double lipschitz_bound = 0.0;
  std::string note;
};

/// {verdict, method, theta, gamma, grid, worst_point, tolerance, ...}
nlohmann::json to_json(const Certificate& c);

}  // namespace twolink
