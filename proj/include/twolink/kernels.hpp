#pragma once

// Data-parallel inner loops.
//
// Every kernel has a scalar reference in `kernels::scalar` and vector variants
// selected at runtime. Variants are bit-identical to the reference: the affine
// terms are evaluated as (offset + t1*slope1) + t2*slope2 without contraction,
// and reductions follow a fixed four-lane order on every ISA.

#include <cstddef>
#include <span>
#include <string_view>

namespace twolink::kernels {

/// Columns of an affine family g_k(t) = offset[k] + t1 slope1[k] + t2 slope2[k].
struct AffineTable {
  std::span<const double> offset;
  std::span<const double> slope1;
  std::span<const double> slope2;

  std::size_t size() const { return offset.size(); }
};

/// Extremum and the lowest index attaining it. index == size() for an empty table.
struct Extremum {
  double value;
  std::size_t index;
};

/// Shifted power sums: sum (v - shift) and sum (v - shift)^2.
struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
};

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// Best variant supported by this CPU and build.
Isa detected_isa();
/// Variant used by the dispatching entry points below.
Isa active_isa();
/// Pins the dispatch (tests, TWOLINK_ISA=scalar). Throws std::invalid_argument
/// for a variant this CPU or build cannot run.
void force_isa(Isa isa);
bool isa_available(Isa isa);

Extremum lower_envelope(const AffineTable& table, double t1, double t2);
Extremum upper_envelope(const AffineTable& table, double t1, double t2);
Moments shifted_moments(std::span<const double> values, double shift);

namespace scalar {
Extremum lower_envelope(const AffineTable& table, double t1, double t2);
Extremum upper_envelope(const AffineTable& table, double t1, double t2);
Moments shifted_moments(std::span<const double> values, double shift);
}  // namespace scalar

namespace avx2 {
Extremum lower_envelope(const AffineTable& table, double t1, double t2);
Extremum upper_envelope(const AffineTable& table, double t1, double t2);
Moments shifted_moments(std::span<const double> values, double shift);
}  // namespace avx2

namespace neon {
Extremum lower_envelope(const AffineTable& table, double t1, double t2);
Extremum upper_envelope(const AffineTable& table, double t1, double t2);
Moments shifted_moments(std::span<const double> values, double shift);
}  // namespace neon

}  // namespace twolink::kernels
