#include "twolink/certificate.hpp"

#include <stdexcept>

namespace twolink {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::thm1: return "thm1";
    case Method::thm2_sip: return "thm2_sip";
    case Method::thm3_sip: return "thm3_sip";
    case Method::monte_carlo: return "monte_carlo";
  }
  return "?";
}

Verdict parse_verdict(std::string_view s) {
  if (s == "stable") return Verdict::stable;
  if (s == "unstable") return Verdict::unstable;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw std::invalid_argument("unknown verdict: " + std::string(s));
}

nlohmann::json to_json(const Certificate& c) {
  nlohmann::json j;
  j["verdict"] = to_string(c.verdict);
  j["method"] = to_string(c.method);
  j["theta"] = c.witness ? nlohmann::json::array({c.witness->e1, c.witness->e2}) : nlohmann::json();
  j["gamma"] = c.margin;
  j["alpha"] = c.alpha;
  j["grid"] = c.grid;
  j["worst_point"] = c.worst_point ? nlohmann::json::array({(*c.worst_point)[0], (*c.worst_point)[1]})
                                   : nlohmann::json();
  j["tolerance"] = c.tolerance;
  j["exchange_rounds"] = c.exchange_rounds;
  j["lipschitz_bound"] = c.lipschitz_bound;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

}  // namespace twolink
