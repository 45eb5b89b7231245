#pragma once

#include <string_view>

#include "twolink/certificate.hpp"
#include "twolink/network.hpp"

namespace twolink {

enum class LyapunovFamily {
  /// 1/2 ((x1 - theta1)_+ + (x2 - theta2)_+)^2; infinite-buffer variant.
  thm1_quadratic,
  /// x0 (x0/2 + theta1 x1 + theta2 x2); finite-buffer variant.
  thm2_weighted,
  /// xi1 - 1 / (x0 + theta1 x1 + theta2 x2 + xi2); x0 is 0 without an upstream link.
  test_reciprocal,
};

std::string_view to_string(LyapunovFamily f);
LyapunovFamily parse_lyapunov_family(std::string_view s);

struct LyapunovSpec {
  LyapunovFamily family = LyapunovFamily::thm1_quadratic;
  ThetaPoint theta;
  double xi1 = 10.0;
  double xi2 = 10.0;

  /// Throws VariantError for a family the spec variant does not support and
  /// std::invalid_argument for negative theta or xi1 xi2 < 1.
  void check(const NetworkSpec& spec) const;
  double value(const NetworkSpec& spec, const NetworkState& s) const;
};

struct DriftOptions {
  /// Gauss-Legendre nodes per smooth piece, in each of demand and compliance.
  int nodes = 24;
  /// Equal panels per compliance piece.
  int compliance_panels = 8;
};

/// E[V(next) | x] - V(x) by tensor-product quadrature over demand and
/// compliance, split where the one-step map or V has a kink.
double drift(const NetworkSpec& spec, const LyapunovSpec& lyap, const NetworkState& x,
             const DriftOptions& opt = {});

}  // namespace twolink
