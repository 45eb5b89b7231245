#include <atomic>
#include <sstream>

#include <doctest.h>

#include "twolink/config.hpp"
#include "twolink/sweep.hpp"

using namespace twolink;

namespace {

ScenarioConfig small(const char* name, int n) {
  ScenarioConfig cfg = preset(name);
  cfg.d_lo_grid = linspace(0.0, 1.2, n);
  cfg.c_bar_grid = linspace(0.0, 1.0, n);
  cfg.sweep_simulate = false;
  return cfg;
}

}  // namespace

TEST_CASE("presets") {
  const auto names = preset_names();
  CHECK(names.size() == 2);
  for (const auto& n : names) CHECK_NOTHROW(preset(n).validate());
  CHECK_THROWS_AS(preset("nope"), std::invalid_argument);

  const ScenarioConfig inf = preset("paper-infinite");
  CHECK(inf.variant == BufferVariant::infinite_buffer);
  CHECK(inf.d_lo_grid.size() == 21);
  CHECK(inf.c_bar_grid.size() == 21);
  const NetworkSpec s = inf.build_spec(0.4, 0.79);
  CHECK(s.demand.mean() == doctest::Approx(0.8));
  CHECK(s.compliance.c_bar() == 0.79);
  CHECK(preset("paper-finite").build_spec().finite());
}

TEST_CASE("config round trip") {
  for (const char* name : {"paper-infinite", "paper-finite"}) {
    ScenarioConfig cfg = preset(name);
    cfg.seed = 77;
    cfg.d_lo_grid = {0.1, 0.5};
    cfg.sim.burn_in = 123;
    cfg.cert.sip.lower_mode = LowerBoundMode::literal;
    const nlohmann::json j = serialize(cfg);
    const ScenarioConfig back = parse_config(j);
    CHECK(serialize(back) == j);
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(serialize(parse_config(nlohmann::json::parse(j.dump()))) == j);
  }
  ScenarioConfig a = preset("paper-infinite"), b = a;
  b.c_bar = 0.5;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("config parsing errors") {
  const nlohmann::json base = serialize(preset("paper-infinite"));
  nlohmann::json j = base;
  j["colour"] = "blue";
  CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
  j = base;
  j["routing"]["nu_e3_per_density"] = 1.0;
  CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
  j = base;
  j["variant"] = "sideways";
  CHECK_THROWS_AS(parse_config(j), std::invalid_argument);
  j = base;
  j["seed"] = "seven";
  CHECK_THROWS_AS(parse_config(j), std::invalid_argument);

  ScenarioConfig empty = preset("paper-infinite");
  empty.c_bar_grid.clear();
  CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
  ScenarioConfig unsorted = preset("paper-infinite");
  unsorted.d_lo_grid = {0.5, 0.1};
  CHECK_THROWS_AS(unsorted.validate(), std::invalid_argument);

  const nlohmann::json partial = {{"variant", "finite_buffer_with_upstream"}, {"seed", 9}};
  const ScenarioConfig p = parse_config(partial);
  CHECK(p.seed == 9);
  CHECK(p.variant == BufferVariant::finite_buffer_with_upstream);
}

TEST_CASE("linspace") {
  const auto v = linspace(0.0, 1.2, 5);
  REQUIRE(v.size() == 5);
  CHECK(v.front() == 0.0);
  CHECK(v.back() == 1.2);
  CHECK(v[2] == doctest::Approx(0.6));
  CHECK(linspace(0.3, 0.9, 1) == std::vector<double>{0.3});
}

TEST_CASE("parallel_for") {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 8, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) CHECK(h == 1);
  std::atomic<int> calls{0};
  CHECK_THROWS_WITH(parallel_for(100, 4,
                                 [&](std::size_t i) {
                                   ++calls;
                                   if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
                                 }),
                    "17");
  CHECK(calls == 100);
  CHECK_THROWS_AS(parallel_for(3, 0, [](std::size_t) {}), std::invalid_argument);
}

TEST_CASE("infinite sweep shape") {
  const ScenarioConfig cfg = small("paper-infinite", 5);
  const SweepResult r = sweep_region(cfg, 4);
  REQUIRE(r.rows.size() == 25);
  for (const SweepRow& row : r.rows) {
    CHECK(row.error.empty());
    CHECK(std::abs(row.alpha - (0.5 * row.d_lo + 0.5 * 1.2)) <= 1e-15);
    CHECK(row.method == Method::thm1);
    CHECK_FALSE(row.verdict_sim.has_value());
  }
  // Along each c_bar row stability gives way to instability as d_lo grows, and
  // the largest stable d_lo never falls as c_bar grows.
  int prev_edge = -1;
  for (int j = 0; j < 5; ++j) {
    int edge = -1;
    bool seen_unstable = false;
    for (int i = 0; i < 5; ++i) {
      const Verdict v = r.rows[i * 5 + j].verdict_cert;
      if (v == Verdict::stable) {
        CHECK_FALSE(seen_unstable);
        edge = i;
      } else {
        seen_unstable = true;
      }
    }
    CHECK(edge >= prev_edge);
    prev_edge = edge;
  }
}

TEST_CASE("finite sweep has an inconclusive gap") {
  ScenarioConfig cfg = small("paper-finite", 10);
  cfg.c_bar_grid = {0.8, 1.0};
  const SweepResult r = sweep_region(cfg, 4);
  int gap = 0;
  for (const SweepRow& row : r.rows) {
    CHECK(row.error.empty());
    gap += row.verdict_cert == Verdict::inconclusive;
    CHECK_FALSE((row.gamma_thm2 > 1e-6 && row.gamma_thm3 >= 0.0));
  }
  CHECK(gap > 0);
}

TEST_CASE("sweep output does not depend on the worker count") {
  ScenarioConfig cfg = small("paper-infinite", 3);
  cfg.sweep_simulate = true;
  cfg.sim.horizon = 20000;
  const std::string one = sweep_csv(sweep_region(cfg, 1));
  const std::string many = sweep_csv(sweep_region(cfg, 6));
  CHECK(one == many);
  std::istringstream lines(one);
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("d_lo,c_bar,alpha,verdict_cert,method,verdict_sim", 0) == 0);
  CHECK(one.find("-0,") == std::string::npos);
}

TEST_CASE("throughput curve rows") {
  ScenarioConfig cfg = preset("paper-infinite");
  cfg.c_bar_grid = {0.0, 0.79};
  const auto rows = throughput_curve(cfg, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].throughput_lo == rows[0].throughput_hi);
  CHECK(std::abs(rows[0].throughput_lo - 0.6) < 1e-3);
  CHECK(rows[1].expected_compliance == doctest::Approx(0.395));
  const std::string csv = throughput_csv(rows);
  CHECK(csv.rfind("c_bar,expected_compliance,throughput_lo,throughput_hi", 0) == 0);

  const auto j = sidecar(cfg, "throughput-curve");
  CHECK(j.at("tool_version") == kToolVersion);
  CHECK(j.contains("config_hash"));
  CHECK(j.at("config") == serialize(cfg));
}
