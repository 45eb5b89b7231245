#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "twolink/nelder_mead.hpp"

namespace twolink::detail {

struct ThetaSample {
  std::array<double, 2> p;
  double value;
};

struct ThetaSearchOptions {
  int grid = 17;
  int zoom_levels = 3;
  int starts = 4;
  NelderMeadOptions polish{};
};

struct ThetaSearchResult {
  ThetaSample best;
  double coarse_best = 0.0;
  /// Improvement contributed by the last zoom level of the leading start.
  double last_zoom_gain = 0.0;
};

// Row-major scan including both box edges.
template <class F>
std::vector<ThetaSample> scan_box(F&& f, const Box<2>& box, int n) {
  std::vector<ThetaSample> out;
  out.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double t1 = box.lo[0] + (box.hi[0] - box.lo[0]) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double t2 = box.lo[1] + (box.hi[1] - box.lo[1]) * j / (n - 1);
      out.push_back({{t1, t2}, f(std::array<double, 2>{t1, t2})});
    }
  }
  return out;
}

/// Maximizes f over a box: uniform grid, the best few points zoomed in
/// repeatedly, then Nelder-Mead. Deterministic; ties keep the earlier point.
template <class F>
ThetaSearchResult maximize_on_box(F&& f, const Box<2>& box, const ThetaSearchOptions& opt) {
  std::vector<ThetaSample> coarse = scan_box(f, box, opt.grid);
  std::stable_sort(coarse.begin(), coarse.end(),
                   [](const ThetaSample& a, const ThetaSample& b) { return a.value > b.value; });

  ThetaSearchResult res;
  res.best = coarse.front();
  res.coarse_best = res.best.value;
  const std::array<double, 2> h0{(box.hi[0] - box.lo[0]) / (opt.grid - 1),
                                 (box.hi[1] - box.lo[1]) / (opt.grid - 1)};
  const int starts = std::min<int>(opt.starts, static_cast<int>(coarse.size()));
  for (int s = 0; s < starts; ++s) {
    ThetaSample local = coarse[s];
    std::array<double, 2> h = h0;
    for (int level = 0; level < opt.zoom_levels; ++level) {
      Box<2> zoom;
      for (int d = 0; d < 2; ++d) {
        zoom.lo[d] = std::max(box.lo[d], local.p[d] - 2 * h[d]);
        zoom.hi[d] = std::min(box.hi[d], local.p[d] + 2 * h[d]);
      }
      const double before = local.value;
      for (const ThetaSample& z : scan_box(f, zoom, opt.grid))
        if (z.value > local.value) local = z;
      for (int d = 0; d < 2; ++d) h[d] = 4 * h[d] / (opt.grid - 1);
      if (s == 0 && level + 1 == opt.zoom_levels) res.last_zoom_gain = local.value - before;
    }
    const auto nm = nelder_mead_minimize<2>([&](std::array<double, 2> t) { return -f(t); },
                                            local.p, h, box, opt.polish);
    if (-nm.value > local.value) local = {nm.point, -nm.value};
    if (local.value > res.best.value) res.best = local;
  }
  return res;
}

}  // namespace twolink::detail
