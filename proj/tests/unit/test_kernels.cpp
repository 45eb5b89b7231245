#include <cstring>
#include <random>
#include <stdexcept>

#include <doctest.h>

#include "twolink/kernels.hpp"

using namespace twolink;
using namespace twolink::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

struct Table {
  std::vector<double> off, s1, s2;
  AffineTable view() const { return {off, s1, s2}; }
};

Table random_table(std::mt19937_64& gen, std::size_t n) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Table t;
  for (std::size_t i = 0; i < n; ++i) {
    t.off.push_back(u(gen));
    t.s1.push_back(u(gen));
    t.s2.push_back(u(gen));
  }
  return t;
}

Extremum brute_min(const Table& t, double t1, double t2) {
  Extremum e{0.0, t.off.size()};
  for (std::size_t i = 0; i < t.off.size(); ++i) {
    const double v = (t.off[i] + t1 * t.s1[i]) + t2 * t.s2[i];
    if (e.index == t.off.size() || v < e.value) e = {v, i};
  }
  return e;
}

}  // namespace

TEST_CASE("envelope scalar reference against brute force") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t n : {std::size_t{1}, std::size_t{3}, std::size_t{4}, std::size_t{17}, std::size_t{4225}}) {
    const Table t = random_table(gen, n);
    const double t1 = u(gen), t2 = u(gen);
    const Extremum got = scalar::lower_envelope(t.view(), t1, t2);
    const Extremum want = brute_min(t, t1, t2);
    CHECK(got.value == want.value);
    CHECK(got.index == want.index);
  }
  const Table empty;
  CHECK(scalar::lower_envelope(empty.view(), 0.5, 0.5).index == 0);
}

TEST_CASE("envelope ties resolve to the lowest index") {
  Table t;
  t.off = {1.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0};
  t.s1.assign(7, 0.0);
  t.s2.assign(7, 0.0);
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) continue;
    force_isa(isa);
    CHECK(lower_envelope(t.view(), 0.3, 0.3).index == 1);
    CHECK(upper_envelope(t.view(), 0.3, 0.3).index == 3);
  }
  force_isa(detected_isa());
}

TEST_CASE("vector kernels are bit-identical to the scalar reference") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_available(isa)) continue;
    auto lo = isa == Isa::avx2 ? &avx2::lower_envelope : &neon::lower_envelope;
    auto hi = isa == Isa::avx2 ? &avx2::upper_envelope : &neon::upper_envelope;
    auto mom = isa == Isa::avx2 ? &avx2::shifted_moments : &neon::shifted_moments;
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + static_cast<std::size_t>(u(gen) * 5000);
      const Table t = random_table(gen, n);
      const double t1 = u(gen), t2 = u(gen);
      const Extremum a = scalar::lower_envelope(t.view(), t1, t2), b = lo(t.view(), t1, t2);
      CHECK(same_bits(a.value, b.value));
      CHECK(a.index == b.index);
      const Extremum c = scalar::upper_envelope(t.view(), t1, t2), d = hi(t.view(), t1, t2);
      CHECK(same_bits(c.value, d.value));
      CHECK(c.index == d.index);

      std::vector<double> v(n);
      for (double& x : v) x = 10.0 * u(gen) - 5.0;
      const Moments m1 = scalar::shifted_moments(v, v[0]), m2 = mom(v, v[0]);
      CHECK(same_bits(m1.sum, m2.sum));
      CHECK(same_bits(m1.sum_sq, m2.sum_sq));
    }
  }
}

TEST_CASE("shifted moments") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0, 5.0};
  const Moments m = scalar::shifted_moments(v, 1.0);
  CHECK(m.sum == 10.0);
  CHECK(m.sum_sq == 30.0);
  CHECK(scalar::shifted_moments({}, 0.0).sum == 0.0);
}

TEST_CASE("isa selection") {
  CHECK(isa_available(Isa::scalar));
  CHECK(isa_available(detected_isa()));
  force_isa(Isa::scalar);
  CHECK(active_isa() == Isa::scalar);
  if (!isa_available(Isa::neon)) CHECK_THROWS_AS(force_isa(Isa::neon), std::invalid_argument);
  force_isa(detected_isa());
}
