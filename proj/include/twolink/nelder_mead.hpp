#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace twolink {

template <std::size_t N>
struct Box {
  std::array<double, N> lo;
  std::array<double, N> hi;

  std::array<double, N> clamp(std::array<double, N> p) const {
    for (std::size_t i = 0; i < N; ++i) p[i] = std::clamp(p[i], lo[i], hi[i]);
    return p;
  }
};

template <std::size_t N>
struct NelderMeadResult {
  std::array<double, N> point;
  double value;
  int evaluations;
};

struct NelderMeadOptions {
  int max_evaluations = 400;
  double value_tolerance = 1e-13;
  double size_tolerance = 1e-10;
};

/// Minimizes f over a box. Trial points are projected onto the box, which is
/// enough for the low-dimensional, continuous objectives used here.
template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead_minimize(F&& f, std::array<double, N> start,
                                         std::array<double, N> step, const Box<N>& box,
                                         const NelderMeadOptions& opt = {}) {
  using Point = std::array<double, N>;
  std::array<Point, N + 1> simplex;
  std::array<double, N + 1> values;
  int evals = 0;
  auto eval = [&](const Point& p) {
    ++evals;
    return f(p);
  };

  simplex[0] = box.clamp(start);
  for (std::size_t i = 0; i < N; ++i) {
    Point p = simplex[0];
    p[i] += step[i];
    if (p[i] > box.hi[i]) p[i] = simplex[0][i] - step[i];
    simplex[i + 1] = box.clamp(p);
  }
  for (std::size_t i = 0; i <= N; ++i) values[i] = eval(simplex[i]);

  auto combine = [&](const Point& a, const Point& b, double t) {
    Point p;
    for (std::size_t i = 0; i < N; ++i) p[i] = a[i] + t * (b[i] - a[i]);
    return box.clamp(p);
  };

  while (evals < opt.max_evaluations) {
    std::array<std::size_t, N + 1> order;
    for (std::size_t i = 0; i <= N; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    {
      auto s2 = simplex;
      auto v2 = values;
      for (std::size_t i = 0; i <= N; ++i) {
        simplex[i] = s2[order[i]];
        values[i] = v2[order[i]];
      }
    }

    double size = 0.0;
    for (std::size_t i = 1; i <= N; ++i)
      for (std::size_t d = 0; d < N; ++d) size = std::max(size, std::abs(simplex[i][d] - simplex[0][d]));
    if (std::abs(values[N] - values[0]) < opt.value_tolerance && size < opt.size_tolerance) break;
    if (size < opt.size_tolerance) break;

    Point centroid{};
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t d = 0; d < N; ++d) centroid[d] += simplex[i][d] / static_cast<double>(N);

    const Point reflected = combine(centroid, simplex[N], -1.0);
    const double fr = eval(reflected);
    if (fr < values[0]) {
      const Point expanded = combine(centroid, simplex[N], -2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        simplex[N] = expanded;
        values[N] = fe;
      } else {
        simplex[N] = reflected;
        values[N] = fr;
      }
      continue;
    }
    if (fr < values[N - 1]) {
      simplex[N] = reflected;
      values[N] = fr;
      continue;
    }
    const bool outside = fr < values[N];
    const Point contracted = outside ? combine(centroid, reflected, 0.5) : combine(centroid, simplex[N], 0.5);
    const double fc = eval(contracted);
    if (fc < std::min(fr, values[N])) {
      simplex[N] = contracted;
      values[N] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= N; ++i) {
      simplex[i] = combine(simplex[0], simplex[i], 0.5);
      values[i] = eval(simplex[i]);
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= N; ++i)
    if (values[i] < values[best]) best = i;
  return {simplex[best], values[best], evals};
}

}  // namespace twolink
