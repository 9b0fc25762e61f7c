#pragma once

// Reference computations written independently of the library, used as
// oracles by the unit and acceptance suites.

#include <cmath>
#include <algorithm>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

/// Simpson over consecutive intervals [p_i, p_{i+1}].
inline double simpson_pieces(const std::function<double(double)>& f, const std::vector<double>& points,
                             int n_per_piece) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) s += simpson(f, points[i], points[i + 1], n_per_piece);
  return s;
}

inline double sign_cos(double t) { return std::cos(t) >= 0.0 ? 1.0 : -1.0; }

/// (1/2π)∫ q(t) e^{-ikt} dt integrated in closed form over the two constant
/// pieces of q on [-π/2, 3π/2).
inline std::complex<double> quantizer_coefficient(int k) {
  using C = std::complex<double>;
  if (k == 0) return 0.0;
  const C ik(0.0, static_cast<double>(k));
  auto prim = [&](double t) { return std::exp(-ik * t) / (-ik); };
  const C plus = prim(pi / 2) - prim(-pi / 2);
  const C minus = prim(3 * pi / 2) - prim(pi / 2);
  return (plus - minus) / (2 * pi);
}

/// Triangular autocorrelation of q: (1/2π)∫ q(s + t) q(s) ds computed by
/// direct numerical integration (piecewise constant integrand).
inline double quantizer_autocorrelation(double t) {
  auto f = [t](double s) { return sign_cos(s + t) * sign_cos(s); };
  // Integrand is piecewise constant; split at the jumps of both factors.
  std::vector<double> pts = {0.0, 2 * pi};
  for (double base : {pi / 2, 3 * pi / 2}) {
    pts.push_back(base);
    double shifted = std::fmod(base - t, 2 * pi);
    if (shifted < 0) shifted += 2 * pi;
    pts.push_back(shifted);
  }
  std::sort(pts.begin(), pts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    if (b > a) s += f(0.5 * (a + b)) * (b - a);
  }
  return s / (2 * pi);
}

/// E h(sZ), Z ~ N(0, 1), by Simpson on [-L, L].
inline double gaussian_expectation(const std::function<double(double)>& h, double s, int panels = 400000,
                                   double L = 12.0) {
  auto g = [&](double z) { return h(s * z) * std::exp(-0.5 * z * z) / std::sqrt(2 * pi); };
  return simpson(g, -L, L, panels);
}

/// 1 - 2|t'|/π with t' = t reduced to [-π, π].
inline double triangle(double t) {
  double r = std::remainder(t, 2 * pi);
  return 1.0 - 2.0 * std::abs(r) / pi;
}

/// Sample mean and standard error.
struct MeanSe {
  double mean, se;
};
inline MeanSe mean_se(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, std::sqrt(ss / (v.size() - 1) / v.size())};
}

}  // namespace oracle
