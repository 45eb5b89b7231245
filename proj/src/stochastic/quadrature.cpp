#include "twolink/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <boost/math/special_functions/legendre.hpp>

namespace twolink::quad {

namespace {

Rule build_rule(int n) {
  // Boost returns the nonnegative zeros of P_n in increasing order.
  const auto zeros = boost::math::legendre_p_zeros<double>(n);
  Rule rule;
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    rule.nodes.push_back(-*it);
  }
  for (double z : zeros) rule.nodes.push_back(z);
  for (double x : rule.nodes) {
    const double dp = boost::math::legendre_p_prime<double>(n, x);
    rule.weights.push_back(2.0 / ((1.0 - x * x) * dp * dp));
  }
  return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(build_rule(n));
  return *slot;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n) {
  if (a == b) return 0.0;
  const Rule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

double integrate_composite(const std::function<double(double)>& f, double a, double b, int n,
                           int panels) {
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = p + 1 == panels ? b : a + (p + 1) * h;
    sum += integrate(f, lo, hi, n);
  }
  return sum;
}

double integrate_doubling(const std::function<double(double)>& f, double a, double b, int n0,
                          double tol, int max_doublings) {
  double prev = integrate(f, a, b, n0);
  int n = n0;
  for (int k = 0; k < max_doublings; ++k) {
    n *= 2;
    const double next = integrate(f, a, b, n);
    if (std::abs(next - prev) < tol) return next;
    prev = next;
  }
  return prev;
}

double integrate_pieces(const std::function<double(double)>& f, double a, double b,
                        std::span<const double> cuts, int n, int panels) {
  std::vector<double> edges{a};
  for (double c : cuts) {
    if (c > a && c < b) edges.push_back(c);
  }
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    sum += integrate_composite(f, edges[i], edges[i + 1], n, panels);
  }
  return sum;
}

}  // namespace twolink::quad
