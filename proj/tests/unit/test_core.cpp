#include <cmath>
#include <random>

#include <doctest.h>

#include "twolink/network.hpp"

using namespace twolink;

namespace {

// Logit split written out directly, no shared code with LogitRouting.
std::pair<double, double> logit(double nu1, double nu2, double x1, double x2) {
  const double a = std::exp(-nu1 * x1), b = std::exp(-nu2 * x2);
  return {a / (a + b), b / (a + b)};
}

double grid_capacity(const LinkSpec& l, double hi, int n) {
  double best = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = hi * i / n;
    const FlowBound r = l.receiving.eval(x);
    best = std::max(best, r.cap(l.sending.value(x)));
  }
  return best;
}

}  // namespace

TEST_CASE("flow profile values") {
  const auto f = FlowProfile::triangular_sending(1.0, 0.6);
  CHECK(f.value(0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(f.value(0.0) == 0.0);
  CHECK(f.value(5.0) == doctest::Approx(0.6));
  CHECK(f.saturation_density() == doctest::Approx(0.6));

  const auto r = FlowProfile::linear_receiving(1.2, 0.5);
  CHECK(r.value(2.4) == 0.0);
  CHECK(r.value(3.0) == 0.0);
  CHECK(r.value(1.0) == doctest::Approx(0.7));
  REQUIRE(r.zero_density());
  CHECK(*r.zero_density() == doctest::Approx(2.4));

  const auto inf = FlowProfile::infinite_receiving();
  CHECK(inf.eval(7.0).is_unbounded());
  CHECK(inf.eval(7.0).cap(0.3) == 0.3);
  CHECK_THROWS_AS(inf.value(1.0), std::logic_error);
  CHECK_THROWS_AS(f.eval(-0.1), std::domain_error);
}

TEST_CASE("flow profile validation") {
  CHECK_THROWS_AS(FlowProfile::sending({{0.0, 0.0}, {1.0, 0.5}, {0.5, 0.6}}, 0.6),
                  std::invalid_argument);
  CHECK_THROWS_AS(FlowProfile::sending({{0.0, 0.1}, {1.0, 0.5}}, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(FlowProfile::sending({{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.4}}, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(FlowProfile::receiving({{0.0, 1.0}, {1.0, 1.2}}), std::invalid_argument);
  CHECK_NOTHROW(FlowProfile::sending({{0.0, 0.0}, {0.5, 0.4}, {1.0, 0.6}}, 0.6));
}

TEST_CASE("capacity examples") {
  const auto e1 = LinkSpec::make(LinkId::e1, FlowProfile::triangular_sending(1.0, 0.6),
                                 FlowProfile::linear_receiving(1.2, 0.5), 1.0);
  const auto e2 = LinkSpec::make(LinkId::e2, FlowProfile::triangular_sending(0.8, 0.4),
                                 FlowProfile::linear_receiving(0.8, 0.4), 1.0);
  const auto e0 = LinkSpec::make(LinkId::e0, FlowProfile::triangular_sending(1.0, 1.0),
                                 FlowProfile::infinite_receiving(), 1.0);
  // Grid step 2.4e-5 lands on the kinks, so the brute-force max is exact here.
  CHECK(std::abs(capacity(e1) - grid_capacity(e1, 2.4, 100000)) < 1e-12);
  CHECK(std::abs(capacity(e2) - grid_capacity(e2, 2.0, 100000)) < 1e-12);
  CHECK(capacity(e1) == doctest::Approx(0.6));
  CHECK(capacity(e2) == doctest::Approx(0.4));
  CHECK(capacity(e0) == doctest::Approx(1.0));
  CHECK(e1.jam_density.value() == doctest::Approx(2.4));
  CHECK_FALSE(e0.jam_density.has_value());
}

TEST_CASE("capacity of random piecewise profiles against a dense grid") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Breakpoint> sp{{0.0, 0.0}};
    double x = 0.0, f = 0.0;
    for (int k = 0; k < 3; ++k) {
      x += u(gen);
      f += u(gen);
      sp.push_back({x, f});
    }
    std::vector<Breakpoint> rp;
    double y = 0.0, r = 3.0 + 3.0 * u(gen);
    rp.push_back({0.0, r});
    for (int k = 0; k < 3; ++k) {
      y += u(gen);
      r = std::max(0.0, r - 2.0 * u(gen));
      rp.push_back({y, r});
    }
    const auto link =
        LinkSpec::make(LinkId::e1, FlowProfile::sending(sp, f), FlowProfile::receiving(rp), 1.0);
    const double hi = link.jam_density.value_or(20.0);
    const int n = 400000;
    const double slope = link.sending.max_abs_slope() + link.receiving.max_abs_slope();
    const double q = capacity(link);
    const double g = grid_capacity(link, hi, n);
    CHECK(q >= g - 1e-12);
    CHECK(q <= g + slope * hi / n + 1e-12);
  }
}

TEST_CASE("logit routing") {
  const LogitRouting r{1.0, 2.0};
  auto b = r.fractions(0.0, 0.0);
  CHECK(b.e1 == 0.5);
  CHECK(b.e2 == 0.5);
  b = r.fractions(1.0, 0.0);
  CHECK(b.e1 == doctest::Approx(0.26894).epsilon(1e-5));
  CHECK(b.e2 == doctest::Approx(0.73106).epsilon(1e-5));
  b = r.fractions(0.3, 0.3);
  const auto [o1, o2] = logit(1.0, 2.0, 0.3, 0.3);
  CHECK(std::abs(b.e1 - 0.57444) < 1e-5);
  CHECK(std::abs(b.e2 - 0.42556) < 1e-5);
  CHECK(std::abs(b.e1 - o1) < 1e-15);
  CHECK(std::abs(b.e2 - o2) < 1e-15);
}

TEST_CASE("logit routing sums to one and is monotone") {
  const LogitRouting r{1.0, 2.0};
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(0.0, 60.0);
  for (int i = 0; i < 20000; ++i) {
    const double x1 = u(gen), x2 = u(gen);
    const auto b = r.fractions(x1, x2);
    REQUIRE(b.e1 + b.e2 == 1.0);
    CHECK(b.e1 >= 0.0);
    CHECK(b.e2 >= 0.0);
  }
  const double h = 0.05;
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j) {
      const double x1 = i * h, x2 = j * h;
      const auto b = r.fractions(x1, x2);
      const auto b1 = r.fractions(x1 + h, x2);
      const auto b2 = r.fractions(x1, x2 + h);
      CHECK(b1.e1 <= b.e1);
      CHECK(b1.e2 >= b.e2);
      CHECK(b2.e1 >= b.e1);
      CHECK(b2.e2 <= b.e2);
    }
}

TEST_CASE("compromised fractions") {
  auto s = compromised_fractions({0.5, 0.5}, 1.0);
  CHECK(s.e1 == 0.5);
  CHECK(s.e2 == 0.5);
  s = compromised_fractions({0.5, 0.5}, 0.0);
  CHECK(s.e1 == 1.0);
  CHECK(s.e2 == 0.0);
  s = compromised_fractions({0.5, 0.5}, 0.4);
  CHECK(s.e1 == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(s.e2 == doctest::Approx(0.2).epsilon(1e-15));

  const LogitRouting r{1.0, 2.0};
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const auto b = r.fractions(5.0 * u(gen), 5.0 * u(gen));
    const auto c = compromised_fractions(b, u(gen));
    CHECK(c.e1 + c.e2 == 1.0);
    const auto id = compromised_fractions(b, 1.0);
    CHECK(id.e1 == b.e1);
    CHECK(id.e2 == b.e2);
  }
}

TEST_CASE("link inflow") {
  CHECK(link_inflow(0.2, 1.0, FlowBound::finite(0.04)) == 0.04);
  CHECK(link_inflow(0.2, 1.0, FlowBound::unbounded()) == 0.2);
  CHECK(link_inflow(0.0, 5.0, FlowBound::finite(0.3)) == 0.0);
}

TEST_CASE("step infinite examples") {
  const NetworkSpec spec = presets::paper_infinite(0.7, 0.79);
  NetworkState s;
  s.x = {0.0, 0.5, 0.2};
  const auto n = step_infinite(spec, s, 1.0, 0.5);

  const auto [b1, b2] = logit(1.0, 2.0, 0.5, 0.2);
  CHECK(std::abs(b1 - 0.475) < 1e-4);
  const double t1 = 1.0 - 0.5 * b2, t2 = 0.5 * b2;
  const double o1 = 0.5 + 0.1 * (t1 - 0.5), o2 = 0.2 + 0.1 * (t2 - 0.8 * 0.2);
  CHECK(std::abs(n.at(LinkId::e1) - o1) < 1e-12);
  CHECK(std::abs(n.at(LinkId::e2) - o2) < 1e-12);
  CHECK(std::abs(n.at(LinkId::e1) - 0.52375) < 1e-5);
  CHECK(std::abs(n.at(LinkId::e2) - 0.21025) < 1e-5);

  NetworkState zero;
  for (double c : {0.0, 0.3, 1.0}) {
    const auto z = step_infinite(spec, zero, 0.0, c);
    CHECK(z.at(LinkId::e1) == 0.0);
    CHECK(z.at(LinkId::e2) == 0.0);
  }
  const auto starved = step_infinite(spec, s, 1.0, 0.0);
  CHECK(std::abs(starved.at(LinkId::e2) - 0.184) < 1e-12);

  CHECK_THROWS_AS(step_finite(spec, s, 1.0, 0.5), VariantError);
}

TEST_CASE("step finite examples") {
  const NetworkSpec spec = presets::paper_finite(0.3, 0.79);
  NetworkState s;
  const auto n = step_finite(spec, s, 0.5, 0.7);
  CHECK(std::abs(n.at(LinkId::e0) - 0.05) < 1e-15);
  CHECK(n.at(LinkId::e1) == 0.0);
  CHECK(n.at(LinkId::e2) == 0.0);

  NetworkState jam;
  jam.x = {1.0, 2.4, 0.0};
  const auto j = step_finite(spec, jam, 0.9, 0.2);
  // Only e1's own outflow changes its density when its inflow is blocked.
  CHECK(std::abs(j.at(LinkId::e1) - (2.4 - 0.1 * 0.6)) < 1e-12);

  NetworkState m;
  m.x = {1.0, 0.5, 0.2};
  const auto k = step_finite(spec, m, 1.0, 0.5);
  const auto [b1, b2] = logit(1.0, 2.0, 0.5, 0.2);
  const double F = 1.0;
  const double q1 = std::min((1.0 - 0.5 * b2) * F, 1.2 - 0.5 * 0.5);
  const double q2 = std::min(0.5 * b2 * F, 0.8 - 0.4 * 0.2);
  CHECK(std::abs(k.at(LinkId::e0) - (1.0 + 0.1 * (1.0 - q1 - q2))) < 1e-12);
  CHECK(std::abs(k.at(LinkId::e1) - (0.5 + 0.1 * (q1 - 0.5))) < 1e-12);
  CHECK(std::abs(k.at(LinkId::e2) - (0.2 + 0.1 * (q2 - 0.16))) < 1e-12);

  CHECK_THROWS_AS(step_infinite(spec, m, 1.0, 0.5), VariantError);
}

TEST_CASE("conservation and jam bound over random steps") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const NetworkSpec inf = presets::paper_infinite(0.0, 1.0);
  const NetworkSpec fin = presets::paper_finite(0.0, 1.0);
  for (int i = 0; i < 20000; ++i) {
    const double d = 1.2 * u(gen), c = u(gen);
    NetworkState s;
    s.x = {0.0, 6.0 * u(gen), 6.0 * u(gen)};
    const auto n = step_infinite(inf, s, d, c);
    const double lhs = (n.x[1] - s.x[1]) / 0.1 + (n.x[2] - s.x[2]) / 0.1;
    const double rhs = d - std::min(s.x[1], 0.6) - std::min(0.8 * s.x[2], 0.4);
    CHECK(std::abs(lhs - rhs) < 1e-12);

    NetworkState f;
    f.x = {3.0 * u(gen), 2.4 * u(gen), 2.0 * u(gen)};
    const auto g = step_finite(fin, f, d, c);
    const double e0_loss = d - (g.x[0] - f.x[0]) / 0.1;
    const double gain = (g.x[1] - f.x[1]) / 0.1 + std::min(f.x[1], 0.6) + (g.x[2] - f.x[2]) / 0.1 +
                        std::min(0.8 * f.x[2], 0.4);
    CHECK(std::abs(e0_loss - gain) < 1e-11);
    CHECK(g.x[1] <= 2.4 + 1e-12);
    CHECK(g.x[2] <= 2.0 + 1e-12);
    CHECK(g.x[0] >= 0.0);
    CHECK(g.x[1] >= 0.0);
    CHECK(g.x[2] >= 0.0);
  }
}

TEST_CASE("spec validation") {
  NetworkSpec spec = presets::paper_finite(0.3, 0.79);
  CHECK_NOTHROW(spec.validate());
  spec.dt = 3.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  spec = presets::paper_finite(0.3, 0.79);
  spec.links[0] = LinkSpec::make(LinkId::e0, FlowProfile::triangular_sending(1.0, 0.5),
                                 FlowProfile::infinite_receiving(), 1.0);
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CHECK_THROWS_AS(LinkSpec::make(LinkId::e1, FlowProfile::triangular_sending(1.0, 0.6),
                                 FlowProfile::infinite_receiving(), 0.0),
                  std::invalid_argument);
}

TEST_CASE("fixed point probe") {
  const NetworkSpec spec = presets::paper_infinite(0.7, 0.79);
  const auto p = probe_fixed_point(spec, 0.5, 0.5);
  CHECK(p.converged);
  const auto again = step(spec, p.state, 0.5, 0.5);
  CHECK(std::abs(again.x[1] - p.state.x[1]) < 1e-10);
  // Demand above Q1 + Q2 has no fixed point.
  CHECK_FALSE(probe_fixed_point(spec, 1.1, 0.5, 20000).converged);
}
