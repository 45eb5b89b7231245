#include <stdexcept>

#include "twolink/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)
#include <arm_neon.h>
#define TWOLINK_HAVE_NEON 1
#endif

namespace twolink::kernels::neon {

#if defined(TWOLINK_HAVE_NEON)

namespace {

// Lanes 0-1 live in `lo`, lanes 2-3 in `hi`, mirroring the four-lane order of
// the scalar reference.
template <bool kLower>
Extremum envelope(const AffineTable& t, double t1, double t2) {
  const std::size_t n = t.size();
  const std::size_t body = n & ~std::size_t{3};
  const float64x2_t vt1 = vdupq_n_f64(t1);
  const float64x2_t vt2 = vdupq_n_f64(t2);
  float64x2_t best[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  int64x2_t best_idx[2] = {vdupq_n_s64(-1), vdupq_n_s64(-1)};
  const int64_t init_lo[2] = {0, 1};
  const int64_t init_hi[2] = {2, 3};
  int64x2_t cur[2] = {vld1q_s64(init_lo), vld1q_s64(init_hi)};
  const int64x2_t step = vdupq_n_s64(4);

  for (std::size_t i = 0; i < body; i += 4) {
    for (int h = 0; h < 2; ++h) {
      const std::size_t k = i + 2 * h;
      const float64x2_t o = vld1q_f64(t.offset.data() + k);
      const float64x2_t s1 = vld1q_f64(t.slope1.data() + k);
      const float64x2_t s2 = vld1q_f64(t.slope2.data() + k);
      // vmulq + vaddq, never vfmaq: keeps rounding identical to the reference.
      const float64x2_t v = vaddq_f64(vaddq_f64(o, vmulq_f64(vt1, s1)), vmulq_f64(vt2, s2));
      uint64x2_t take;
      if (i == 0) {
        take = vdupq_n_u64(~0ull);
      } else if constexpr (kLower) {
        take = vcltq_f64(v, best[h]);
      } else {
        take = vcgtq_f64(v, best[h]);
      }
      best[h] = vbslq_f64(take, v, best[h]);
      best_idx[h] = vbslq_s64(take, cur[h], best_idx[h]);
      cur[h] = vaddq_s64(cur[h], step);
    }
  }

  double vals[4];
  int64_t idx[4];
  vst1q_f64(vals, best[0]);
  vst1q_f64(vals + 2, best[1]);
  vst1q_s64(idx, best_idx[0]);
  vst1q_s64(idx + 2, best_idx[1]);

  Extremum out{0.0, n};
  bool have = false;
  auto offer = [&](double v, std::size_t k) {
    const bool better = kLower ? v < out.value : v > out.value;
    if (!have || better || (v == out.value && k < out.index)) {
      out = {v, k};
      have = true;
    }
  };
  for (int j = 0; j < 4; ++j) {
    if (idx[j] >= 0) offer(vals[j], static_cast<std::size_t>(idx[j]));
  }
  for (std::size_t k = body; k < n; ++k) {
    offer((t.offset[k] + t1 * t.slope1[k]) + t2 * t.slope2[k], k);
  }
  return out;
}

}  // namespace

Extremum lower_envelope(const AffineTable& table, double t1, double t2) {
  return envelope<true>(table, t1, t2);
}

Extremum upper_envelope(const AffineTable& table, double t1, double t2) {
  return envelope<false>(table, t1, t2);
}

Moments shifted_moments(std::span<const double> values, double shift) {
  const std::size_t body = values.size() & ~std::size_t{3};
  const float64x2_t vshift = vdupq_n_f64(shift);
  float64x2_t s[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  float64x2_t q[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  for (std::size_t i = 0; i < body; i += 4) {
    for (int h = 0; h < 2; ++h) {
      const float64x2_t d = vsubq_f64(vld1q_f64(values.data() + i + 2 * h), vshift);
      s[h] = vaddq_f64(s[h], d);
      q[h] = vaddq_f64(q[h], vmulq_f64(d, d));
    }
  }
  double sl[4], ql[4];
  vst1q_f64(sl, s[0]);
  vst1q_f64(sl + 2, s[1]);
  vst1q_f64(ql, q[0]);
  vst1q_f64(ql + 2, q[1]);
  Moments m{(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3])};
  for (std::size_t i = body; i < values.size(); ++i) {
    const double d = values[i] - shift;
    m.sum += d;
    m.sum_sq += d * d;
  }
  return m;
}

#else

Extremum lower_envelope(const AffineTable&, double, double) {
  throw std::logic_error("NEON kernels are not built for this target");
}
Extremum upper_envelope(const AffineTable&, double, double) {
  throw std::logic_error("NEON kernels are not built for this target");
}
Moments shifted_moments(std::span<const double>, double) {
  throw std::logic_error("NEON kernels are not built for this target");
}

#endif

}  // namespace twolink::kernels::neon
