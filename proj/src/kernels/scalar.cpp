#include "twolink/kernels.hpp"

namespace twolink::kernels::scalar {

namespace {

inline double affine(const AffineTable& t, std::size_t k, double t1, double t2) {
  return (t.offset[k] + t1 * t.slope1[k]) + t2 * t.slope2[k];
}

}  // namespace

Extremum lower_envelope(const AffineTable& table, double t1, double t2) {
  Extremum best{0.0, table.size()};
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double v = affine(table, k, t1, t2);
    if (best.index == table.size() || v < best.value) best = {v, k};
  }
  return best;
}

Extremum upper_envelope(const AffineTable& table, double t1, double t2) {
  Extremum best{0.0, table.size()};
  for (std::size_t k = 0; k < table.size(); ++k) {
    const double v = affine(table, k, t1, t2);
    if (best.index == table.size() || v > best.value) best = {v, k};
  }
  return best;
}

Moments shifted_moments(std::span<const double> values, double shift) {
  // Four interleaved accumulators, combined pairwise, then the tail in order.
  double s[4] = {0.0, 0.0, 0.0, 0.0};
  double q[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = values.size() & ~std::size_t{3};
  for (std::size_t i = 0; i < body; i += 4) {
    for (int j = 0; j < 4; ++j) {
      const double d = values[i + j] - shift;
      s[j] += d;
      q[j] += d * d;
    }
  }
  Moments m{(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3])};
  for (std::size_t i = body; i < values.size(); ++i) {
    const double d = values[i] - shift;
    m.sum += d;
    m.sum_sq += d * d;
  }
  return m;
}

}  // namespace twolink::kernels::scalar
