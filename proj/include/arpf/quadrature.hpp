#pragma once

#include <functional>
#include <span>
#include <vector>

namespace arpf::quad {

/// Nodes and weights of an n-point rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
Rule gauss_legendre(int n);

/// Composite Gauss-Legendre over [a, b] split at the given interior
/// breakpoints (sorted or not; points outside (a, b) are ignored). Each
/// piece is further cut into `sub` equal panels of `order` nodes.
template <class F>
auto integrate_piecewise(F&& f, double a, double b, std::span<const double> breaks,
                         int order = 32, int sub = 4) -> decltype(f(a));

/// Standard normal density and distribution helpers built on erfc, accurate
/// in the tails.
double normal_pdf(double x);
/// P(a <= Z <= b) for Z ~ N(0, 1).
double normal_mass(double a, double b);

}  // namespace arpf::quad

#include "arpf/detail/quadrature_impl.hpp"
