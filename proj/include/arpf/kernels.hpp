#pragma once

// Expected kernels κ_{f,g}(x, y) = Σ_k F_k G_k^* κ₀(k(x - y)) and the distance
// maps γ_{f,g}(s) = ‖f‖² + ‖g‖² - 2 Re Σ_k F_k G_k^* κ₀(|k| s).

#include <span>
#include <stdexcept>

#include "arpf/periodic_map.hpp"
#include "arpf/sampling.hpp"

namespace arpf {

/// Raised by normalized kernels when |⟨f, g⟩| < 1e-12.
struct OrthogonalPair : std::domain_error {
  using std::domain_error::domain_error;
};

class ExpectedKernel {
 public:
  ExpectedKernel(PeriodicMap f, PeriodicMap g, FrequencySampler sampler,
                 double tail_tol = kSeriesTailTolerance);

  const PeriodicMap& f() const noexcept { return f_; }
  const PeriodicMap& g() const noexcept { return g_; }
  const FrequencySampler& sampler() const noexcept { return sampler_; }

  /// Throws std::invalid_argument on a dimension mismatch.
  cplx operator()(std::span<const double> x, std::span<const double> y) const;
  /// The same series as a function of the sampler's norm of x - y.
  cplx at_distance(double r) const;

  /// ⟨f, g⟩ (the value at x = y).
  cplx pair_inner_product() const noexcept { return fg_; }

  /// κ_{f,g} / ⟨f, g⟩; throws OrthogonalPair when ⟨f, g⟩ vanishes.
  cplx normalized(std::span<const double> x, std::span<const double> y) const;
  cplx normalized_at_distance(double r) const;

 private:
  PeriodicMap f_, g_;
  FrequencySampler sampler_;
  double tol_;
  cplx fg_;
};

/// κ_{q,q} for a Gaussian sampler as E h(t), t ~ N(0, (‖u‖/σ)²), h the
/// triangular autocorrelation of q. The expectation is integrated exactly
/// piece by piece over the linear segments of h. Throws
/// std::invalid_argument for non-Gaussian samplers.
double distorted_qq_closed_form(const FrequencySampler& sampler, double u_norm);

/// Standard Gauss-Hermite rule (weight e^{-x²}) with n nodes.
struct HermiteRule {
  std::vector<double> nodes, weights;
};
HermiteRule gauss_hermite(int n);

/// E h(t) for t ~ N(0, (‖u‖/σ)²) by an n-node Gauss-Hermite rule. Kept for
/// comparison: the kinks of h limit its accuracy to about 1e-4.
double distorted_qq_gauss_hermite(const FrequencySampler& sampler, double u_norm, int nodes = 201);

class DistanceMap {
 public:
  DistanceMap(PeriodicMap f, PeriodicMap g, FrequencySampler sampler,
              double tail_tol = kSeriesTailTolerance);

  /// γ_{f,g}(s); throws std::domain_error for s < 0.
  double operator()(double s) const;

  /// ‖f - g‖² = γ(0) and the limit ‖f‖² + ‖g‖² as s → ∞.
  double bias() const { return (*this)(0.0); }
  double limit() const noexcept { return ff_ + gg_; }

  /// True when the cross spectrum is nonnegative, so γ increases strictly.
  bool invertible() const noexcept { return monotone_; }

  /// s with γ(s) = s′. Closed form for (q, cos) and (cos, cos) with a Gaussian
  /// sampler, bisection to 1e-12 otherwise. Throws std::domain_error when s′
  /// lies outside [γ(0), limit()) and std::logic_error when not invertible.
  double invert(double target) const;

  /// 1/γ′(s): first-order change of the inverted distance per unit change of s′.
  double sensitivity(double s) const;

 private:
  PeriodicMap f_, g_;
  FrequencySampler sampler_;
  double tol_;
  double ff_, gg_;
  bool monotone_;
};

}  // namespace arpf
