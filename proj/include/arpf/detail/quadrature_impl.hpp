#pragma once

#include <algorithm>
#include <vector>

namespace arpf::quad {

const Rule& cached_gauss_legendre(int n);

template <class F>
auto integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                         int order, int sub) -> decltype(f(a)) {
  using R = decltype(f(a));
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());

  const Rule& rule = cached_gauss_legendre(order);
  R total{};
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p];
    const double width = (cuts[p + 1] - lo) / sub;
    for (int s = 0; s < sub; ++s) {
      const double mid = lo + (s + 0.5) * width;
      const double half = 0.5 * width;
      R panel{};
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        panel += rule.weights[i] * f(mid + half * rule.nodes[i]);
      total += half * panel;
    }
  }
  return total;
}

}  // namespace arpf::quad
