#pragma once

#include <functional>
#include <span>
#include <vector>

namespace twolink::quad {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached per n; safe to call concurrently.
const Rule& gauss_legendre(int n);

/// n-point Gauss-Legendre estimate of the integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b, int n);

/// Composite rule: `panels` equal panels, n nodes each.
double integrate_composite(const std::function<double(double)>& f, double a, double b, int n,
                           int panels);

/// Doubles n from n0 until successive estimates differ by less than tol
/// (or max_doublings is reached). Returns the last estimate.
double integrate_doubling(const std::function<double(double)>& f, double a, double b, int n0,
                          double tol, int max_doublings);

/// Integral over [a, b] split at `cuts` (values outside (a, b) are ignored).
double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> cuts, int n, int panels = 1);

}  // namespace twolink::quad
