#include <stdexcept>

#include "twolink/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define TWOLINK_AVX2_TARGET __attribute__((target("avx2")))
#endif

namespace twolink::kernels::avx2 {

#if defined(TWOLINK_AVX2_TARGET)

namespace {

// Reduces four lane candidates plus a scalar tail candidate; ties go to the
// lowest index so the result matches a sequential scan.
template <bool kLower>
Extremum finish(const double* vals, const long long* idx, Extremum tail) {
  Extremum best = tail;
  for (int j = 0; j < 4; ++j) {
    if (idx[j] < 0) continue;
    const auto k = static_cast<std::size_t>(idx[j]);
    const bool better = kLower ? vals[j] < best.value : vals[j] > best.value;
    if (best.index == static_cast<std::size_t>(-1) || better ||
        (vals[j] == best.value && k < best.index))
      best = {vals[j], k};
  }
  return best;
}

template <bool kLower>
TWOLINK_AVX2_TARGET Extremum envelope(const AffineTable& t, double t1, double t2) {
  const std::size_t n = t.size();
  const std::size_t body = n & ~std::size_t{3};
  const __m256d vt1 = _mm256_set1_pd(t1);
  const __m256d vt2 = _mm256_set1_pd(t2);
  __m256d best = _mm256_set1_pd(0.0);
  __m256i best_idx = _mm256_set1_epi64x(-1);
  __m256i cur_idx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i step = _mm256_set1_epi64x(4);

  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d o = _mm256_loadu_pd(t.offset.data() + i);
    const __m256d s1 = _mm256_loadu_pd(t.slope1.data() + i);
    const __m256d s2 = _mm256_loadu_pd(t.slope2.data() + i);
    const __m256d v = _mm256_add_pd(_mm256_add_pd(o, _mm256_mul_pd(vt1, s1)), _mm256_mul_pd(vt2, s2));
    __m256d take;
    if (i == 0) {
      take = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    } else if constexpr (kLower) {
      take = _mm256_cmp_pd(v, best, _CMP_LT_OQ);
    } else {
      take = _mm256_cmp_pd(v, best, _CMP_GT_OQ);
    }
    best = _mm256_blendv_pd(best, v, take);
    best_idx = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(cur_idx), take));
    cur_idx = _mm256_add_epi64(cur_idx, step);
  }

  alignas(32) double vals[4];
  alignas(32) long long idx[4];
  _mm256_store_pd(vals, best);
  _mm256_store_si256(reinterpret_cast<__m256i*>(idx), best_idx);

  Extremum tail{0.0, static_cast<std::size_t>(-1)};
  for (std::size_t k = body; k < n; ++k) {
    const double v = (t.offset[k] + t1 * t.slope1[k]) + t2 * t.slope2[k];
    const bool better = kLower ? v < tail.value : v > tail.value;
    if (tail.index == static_cast<std::size_t>(-1) || better) tail = {v, k};
  }
  Extremum out = finish<kLower>(vals, idx, tail);
  if (out.index == static_cast<std::size_t>(-1)) out = {0.0, n};
  return out;
}

}  // namespace

Extremum lower_envelope(const AffineTable& table, double t1, double t2) {
  return envelope<true>(table, t1, t2);
}

Extremum upper_envelope(const AffineTable& table, double t1, double t2) {
  return envelope<false>(table, t1, t2);
}

TWOLINK_AVX2_TARGET Moments shifted_moments(std::span<const double> values, double shift) {
  const std::size_t body = values.size() & ~std::size_t{3};
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d s = _mm256_setzero_pd();
  __m256d q = _mm256_setzero_pd();
  for (std::size_t i = 0; i < body; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(values.data() + i), vshift);
    s = _mm256_add_pd(s, d);
    q = _mm256_add_pd(q, _mm256_mul_pd(d, d));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
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
  throw std::logic_error("AVX2 kernels are not built for this target");
}
Extremum upper_envelope(const AffineTable&, double, double) {
  throw std::logic_error("AVX2 kernels are not built for this target");
}
Moments shifted_moments(std::span<const double>, double) {
  throw std::logic_error("AVX2 kernels are not built for this target");
}

#endif

}  // namespace twolink::kernels::avx2
