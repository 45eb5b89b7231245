#include <cmath>
#include <random>

#include <doctest.h>

#include "twolink/network.hpp"
#include "twolink/quadrature.hpp"
#include "twolink/rng.hpp"
#include "twolink/stochastic.hpp"

using namespace twolink;

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("rng streams are reproducible and decorrelated") {
  RngStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    REQUIRE(va == b.next_u64());
    same_c += va == c.next_u64();
    same_d += va == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);

  RngStream p(9, 0), q(9, 1);
  const int n = 100000;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = p.uniform01(), y = q.uniform01();
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double corr = cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("uniform draws stay in range") {
  RngStream r(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
  CHECK(r.uniform(0.5, 0.5) == 0.5);
}

TEST_CASE("demand sampling") {
  RngStream r(2, 0);
  const auto point = DemandModel::uniform(0.5, 0.5);
  for (int i = 0; i < 100; ++i) CHECK(sample_demand(point, r) == 0.5);

  const auto m = DemandModel::uniform(0.8, 1.2);
  CHECK(m.mean() == 1.0);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double d = sample_demand(m, r);
    REQUIRE(d >= 0.8);
    REQUIRE(d <= 1.2);
    sum += d;
  }
  CHECK(std::abs(sum / n - 1.0) < 1e-3);
  CHECK_THROWS_AS(DemandModel::uniform(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(DemandModel::uniform(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("compliance sampling") {
  RngStream r(3, 0);
  const auto zero = ComplianceModel::uniform(0.0);
  for (int i = 0; i < 100; ++i) CHECK(sample_compliance(zero, 0.1, 0.2, r) == 0.0);

  const auto m = ComplianceModel::uniform(0.8);
  const auto one = ComplianceModel::uniform(1.0);
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    sum += sample_compliance(m, 0.0, 0.0, r);
    const double c = sample_compliance(one, 0.0, 0.0, r);
    REQUIRE(c >= 0.0);
    REQUIRE(c <= 1.0);
  }
  CHECK(std::abs(sum / n - 0.4) < 1e-3);
  CHECK_THROWS_AS(ComplianceModel::uniform(1.1), std::invalid_argument);
}

TEST_CASE("expected compliance") {
  CHECK(expected_compliance(ComplianceModel::uniform(0.79), 0.3, 1.7) == doctest::Approx(0.395));
  CHECK(expected_compliance(ComplianceModel::uniform(0.0), 0.0, 0.0) == 0.0);
  CHECK(expected_compliance(ComplianceModel::uniform(1.0), 0.0, 0.0) == 0.5);
}

TEST_CASE("tilted compliance law") {
  for (double tilt : {-1.0, -0.4, 0.0, 0.7, 1.0}) {
    const ComplianceLaw law{0.6, tilt};
    const double mass = quad::integrate(
        [&](double c) { return law.density(c); }, 0.0, 0.6, 8);
    const double mean = quad::integrate(
        [&](double c) { return c * law.density(c); }, 0.0, 0.6, 8);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(mean == doctest::Approx(law.mean()).epsilon(1e-13));
    for (double u : {0.0, 0.1, 0.5, 0.9, 0.999}) {
      const double c = law.quantile(u);
      const double cdf = quad::integrate([&](double t) { return law.density(t); }, 0.0, c, 8);
      CHECK(cdf == doctest::Approx(u).epsilon(1e-12));
    }
  }

  const auto base = ComplianceModel::uniform(0.9);
  const auto good = base.with_mean([](double x1, double x2) {
    return 0.3 + 0.15 * x1 / (1.0 + x1) + 0.1 / (1.0 + x2);
  });
  CHECK_NOTHROW(good.check_monotone_mean(3.0, 3.0));
  const auto bad = base.with_mean([](double x1, double) { return 0.6 - 0.1 * x1 / (1.0 + x1); });
  CHECK_THROWS_AS(bad.check_monotone_mean(3.0, 3.0), std::invalid_argument);

  RngStream r(4, 0);
  const auto law = good.law_at(1.0, 0.5);
  double sum = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) sum += sample_compliance(good, 1.0, 0.5, r);
  CHECK(std::abs(sum / n - law.mean()) < 3e-3);
}

TEST_CASE("expected capped affine closed forms") {
  const ComplianceLaw u8{0.8, 0.0};
  CHECK(expected_capped_affine(0.0, 1.0, FlowBound::finite(0.2), u8) == doctest::Approx(0.175));
  const ComplianceLaw u4{0.4, 0.0};
  CHECK(expected_capped_affine(0.0, 0.5, FlowBound::finite(1.0), u4) == doctest::Approx(0.1));

  RngStream r(5, 0);
  const int n = 1000000;
  double s = 0.0, ss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = std::min(r.uniform(0.0, 0.8), 0.2);
    s += v;
    ss += v * v;
  }
  const double mean = s / n, se = std::sqrt((ss / n - mean * mean) / n);
  CHECK(std::abs(mean - 0.175) < 3.0 * se);

  const ComplianceLaw none{0.0, 0.0};
  CHECK(expected_capped_affine(0.0, 2.0, FlowBound::finite(0.3), none) == 0.0);
  CHECK(expected_capped_affine(0.9, -0.5, FlowBound::finite(0.3), none) == 0.3);
}

TEST_CASE("expected inflow reductions and bounds") {
  const NetworkSpec zero = presets::paper_finite(0.3, 0.0);
  CHECK(expected_inflow(zero, LinkId::e2, 0.9, 0.4, 0.3) == 0.0);
  CHECK(expected_inflow(zero, LinkId::e1, 0.9, 0.4, 0.3) == doctest::Approx(std::min(0.9, 1.0)));
  CHECK(expected_inflow(zero, LinkId::e1, 0.9, 2.2, 0.3) == doctest::Approx(1.2 - 0.5 * 2.2));
  CHECK_THROWS_AS(expected_inflow(zero, LinkId::e1, -1.0, 0.0, 0.0), std::invalid_argument);

  const NetworkSpec fin = presets::paper_finite(0.3, 0.9);
  const NetworkSpec inf = presets::paper_infinite(0.3, 0.9);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double F = u(gen), x1 = 2.4 * u(gen), x2 = 2.0 * u(gen);
    const double total =
        expected_inflow(fin, LinkId::e1, F, x1, x2) + expected_inflow(fin, LinkId::e2, F, x1, x2);
    CHECK(total <= F + 1e-12);
    const double free_total =
        expected_inflow(inf, LinkId::e1, F, x1, x2) + expected_inflow(inf, LinkId::e2, F, x1, x2);
    CHECK(free_total == doctest::Approx(F).epsilon(1e-14));
  }
}

TEST_CASE("expected capped affine is nondecreasing in the cap") {
  std::mt19937_64 gen(19);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const ComplianceLaw law{u(gen), 2.0 * u(gen) - 1.0};
    const double a = u(gen), b = 2.0 * u(gen) - 1.0;
    const double r = u(gen);
    CHECK(expected_capped_affine(a, b, FlowBound::finite(r), law) <=
          expected_capped_affine(a, b, FlowBound::finite(r + 0.05), law) + 1e-12);
  }
}

TEST_CASE("gauss-legendre rules") {
  const auto& r3 = quad::gauss_legendre(3);
  REQUIRE(r3.nodes.size() == 3);
  CHECK(r3.nodes[0] == doctest::Approx(-std::sqrt(0.6)).epsilon(1e-15));
  CHECK(r3.nodes[1] == doctest::Approx(0.0));
  CHECK(r3.weights[0] == doctest::Approx(5.0 / 9.0).epsilon(1e-15));
  CHECK(r3.weights[1] == doctest::Approx(8.0 / 9.0).epsilon(1e-15));

  for (int n : {1, 2, 5, 16, 64, 1024}) {
    const auto& r = quad::gauss_legendre(n);
    REQUIRE(static_cast<int>(r.nodes.size()) == n);
    double w = 0.0;
    for (double x : r.weights) w += x;
    CHECK(w == doctest::Approx(2.0).epsilon(1e-13));
    // Exact for degree 2n - 1.
    const int deg = std::min(2 * n - 1, 30);
    const double got = quad::integrate([&](double x) { return std::pow(x, deg - 1) * deg; }, 0.0, 1.0, n);
    CHECK(got == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(quad::integrate_doubling([](double x) { return std::exp(x); }, 0.0, 1.0, 4, 1e-13, 6) ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-14));
  const double cut = 0.3;
  const double kinked = quad::integrate_pieces([](double x) { return std::abs(x - 0.3); }, 0.0, 1.0,
                                               std::span<const double>(&cut, 1), 4);
  CHECK(kinked == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
}
