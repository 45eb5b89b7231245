#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "twolink/kernels.hpp"

namespace twolink::kernels {

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "?";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__) || defined(_M_ARM64)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("TWOLINK_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
    if (v == "neon" && isa_available(Isa::neon)) return Isa::neon;
  }
  return detected_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("kernel variant " + std::string(to_string(isa)) +
                                " is not available on this machine");
  current().store(isa, std::memory_order_relaxed);
}

Extremum lower_envelope(const AffineTable& table, double t1, double t2) {
  switch (active_isa()) {
    case Isa::avx2: return avx2::lower_envelope(table, t1, t2);
    case Isa::neon: return neon::lower_envelope(table, t1, t2);
    case Isa::scalar: break;
  }
  return scalar::lower_envelope(table, t1, t2);
}

Extremum upper_envelope(const AffineTable& table, double t1, double t2) {
  switch (active_isa()) {
    case Isa::avx2: return avx2::upper_envelope(table, t1, t2);
    case Isa::neon: return neon::upper_envelope(table, t1, t2);
    case Isa::scalar: break;
  }
  return scalar::upper_envelope(table, t1, t2);
}

Moments shifted_moments(std::span<const double> values, double shift) {
  switch (active_isa()) {
    case Isa::avx2: return avx2::shifted_moments(values, shift);
    case Isa::neon: return neon::shifted_moments(values, shift);
    case Isa::scalar: break;
  }
  return scalar::shifted_moments(values, shift);
}

}  // namespace twolink::kernels
