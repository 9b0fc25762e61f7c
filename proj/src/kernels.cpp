#include "arpf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "arpf/quadrature.hpp"

namespace arpf {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_cos1(const PeriodicMap& f) { return f.kind() == PeriodicMap::Kind::Cosine && f.scale() == 1; }
bool is_q(const PeriodicMap& f) { return f.kind() == PeriodicMap::Kind::UniversalQuantizer; }

void require_gaussian(const FrequencySampler& s) {
  if (s.kind() != FrequencySampler::Kind::GaussianRBF)
    throw std::invalid_argument("distorted_qq: Gaussian sampler required");
}

// Triangular autocorrelation of q: 1 - 2|t'|/π with t' = t reduced to [-π, π].
double triangular(double t) {
  double r = std::fmod(std::abs(t), 2.0 * kPi);
  if (r > kPi) r = 2.0 * kPi - r;
  return 1.0 - 2.0 * r / kPi;
}

// ‖f‖², exact for the square and triangle waves whose series converge slowly.
double energy(const PeriodicMap& f, double tol) {
  if (is_q(f)) return 1.0;
  if (f.kind() == PeriodicMap::Kind::TriangularWave) return 1.0 / 3.0;
  return pf_inner_product(f, f, tol).real();
}

}  // namespace

ExpectedKernel::ExpectedKernel(PeriodicMap f, PeriodicMap g, FrequencySampler sampler, double tail_tol)
    : f_(std::move(f)), g_(std::move(g)), sampler_(std::move(sampler)), tol_(tail_tol) {
  if (!(tail_tol > 0.0)) throw std::invalid_argument("tail tolerance must be positive");
  const bool same = f_.kind() == g_.kind() && f_.scale() == g_.scale();
  fg_ = same && (is_q(f_) || f_.kind() == PeriodicMap::Kind::TriangularWave) ? cplx(energy(f_, tol_))
                                                                              : pf_inner_product(f_, g_, tol_);
}

cplx ExpectedKernel::at_distance(double r) const {
  if (r == 0.0) return fg_;
  return cross_series(f_, g_, [&](int k) { return sampler_.profile(k * r); }, tol_);
}

cplx ExpectedKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != sampler_.dimension() || y.size() != sampler_.dimension())
    throw std::invalid_argument("expected_kernel: dimension mismatch");
  return at_distance(sampler_.distance(x, y));
}

cplx ExpectedKernel::normalized_at_distance(double r) const {
  if (std::abs(fg_) < 1e-12) throw OrthogonalPair("normalized kernel: <f, g> vanishes");
  return at_distance(r) / fg_;
}

cplx ExpectedKernel::normalized(std::span<const double> x, std::span<const double> y) const {
  if (std::abs(fg_) < 1e-12) throw OrthogonalPair("normalized kernel: <f, g> vanishes");
  return (*this)(x, y) / fg_;
}

double distorted_qq_closed_form(const FrequencySampler& sampler, double u_norm) {
  require_gaussian(sampler);
  if (u_norm < 0.0) throw std::domain_error("distorted_qq: negative norm");
  const double s = u_norm / sampler.bandwidth();
  if (s == 0.0) return 1.0;

  // h is even and linear on each [jπ, (j+1)π]; for t = s z,
  // ∫ (α + β s z) φ(z) dz = α (Φ(b) - Φ(a)) + β s (φ(a) - φ(b)).
  double total = 0.0;
  for (int j = 0;; ++j) {
    const double a = j * kPi / s, b = (j + 1) * kPi / s;
    if (a > 40.0) break;
    const double slope = (j % 2 == 0) ? -2.0 / kPi : 2.0 / kPi;
    const double intercept = triangular(j * kPi) - slope * j * kPi;
    total += intercept * quad::normal_mass(a, b) + slope * s * (quad::normal_pdf(a) - quad::normal_pdf(b));
  }
  return 2.0 * total;
}

HermiteRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = std::pow(kPi, -0.25);
  // Nodes are the eigenvalues of the Jacobi matrix with off-diagonal √(k/2);
  // a Sturm count locates each one by bisection.
  auto count_below = [n](double x) {
    int neg = 0;
    double q = -x;
    if (q < 0.0) ++neg;
    for (int k = 1; k < n; ++k) {
      if (q == 0.0) q = 1e-300;
      q = -x - 0.5 * k / q;
      if (q < 0.0) ++neg;
    }
    return neg;
  };
  const double bound = std::sqrt(2.0 * n) + 1.0;
  for (int i = 0; i < n; ++i) {
    // i-th smallest: count_below(lo) <= i < count_below(hi)
    double lo = -bound, hi = bound;
    while (hi - lo > 4e-16 * std::max(1.0, std::abs(lo) + std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (count_below(mid) > i ? hi : lo) = mid;
    }
    const double z = 0.5 * (lo + hi);
    double p1 = pim4, p2 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p3 = p2;
      p2 = p1;
      p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
    }
    const double pp = std::sqrt(2.0 * n) * p2;
    rule.nodes[n - 1 - i] = z;
    rule.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  return rule;
}

double distorted_qq_gauss_hermite(const FrequencySampler& sampler, double u_norm, int nodes) {
  require_gaussian(sampler);
  const double s = u_norm / sampler.bandwidth();
  const HermiteRule rule = gauss_hermite(nodes);
  double acc = 0.0;
  for (int i = 0; i < nodes; ++i) acc += rule.weights[i] * triangular(std::numbers::sqrt2 * s * rule.nodes[i]);
  return acc / std::sqrt(kPi);
}

DistanceMap::DistanceMap(PeriodicMap f, PeriodicMap g, FrequencySampler sampler, double tail_tol)
    : f_(std::move(f)), g_(std::move(g)), sampler_(std::move(sampler)), tol_(tail_tol) {
  ff_ = energy(f_, tol_);
  gg_ = energy(g_, tol_);
  monotone_ = has_nonnegative_cross_spectrum(f_, g_);
}

double DistanceMap::operator()(double s) const {
  if (!(s >= 0.0)) throw std::domain_error("distance map: s must be nonnegative");
  if (is_q(f_) && is_q(g_) && sampler_.kind() == FrequencySampler::Kind::GaussianRBF)
    return 2.0 - 2.0 * distorted_qq_closed_form(sampler_, s);
  const cplx cross =
      s == 0.0 ? pf_inner_product(f_, g_, tol_)
               : cross_series(f_, g_, [&](int k) { return sampler_.profile(k * s); }, tol_);
  return ff_ + gg_ - 2.0 * cross.real();
}

double DistanceMap::invert(double target) const {
  if (!monotone_) throw std::logic_error("distance map is not invertible for this pair");
  const bool gaussian = sampler_.kind() == FrequencySampler::Kind::GaussianRBF;
  const double sigma = sampler_.bandwidth();

  if (gaussian && ((is_q(f_) && is_cos1(g_)) || (is_cos1(f_) && is_q(g_)))) {
    const double lo = 1.5 - 4.0 / kPi;
    if (target < lo - 1e-12 || target >= 1.5) throw std::domain_error("distance map: value out of range");
    const double arg = 3.0 * kPi / 8.0 - kPi / 4.0 * target;
    return sigma * std::sqrt(std::max(0.0, -2.0 * std::log(arg)));
  }
  if (gaussian && is_cos1(f_) && is_cos1(g_)) {
    if (target < -1e-12 || target >= 1.0) throw std::domain_error("distance map: value out of range");
    return sigma * std::sqrt(std::max(0.0, -2.0 * std::log1p(-std::max(0.0, target))));
  }

  const double base = (*this)(0.0);
  if (target < base - 1e-12 || target >= limit()) throw std::domain_error("distance map: value out of range");
  if (target <= base) return 0.0;
  double lo = 0.0, hi = sampler_.bandwidth();
  int grow = 0;
  while ((*this)(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 200) throw std::domain_error("distance map: value not reached");
  }
  while (hi - lo > 1e-12 * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    ((*this)(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double DistanceMap::sensitivity(double s) const {
  const double h = 1e-6 * std::max(1.0, s);
  const double slope = s > h ? ((*this)(s + h) - (*this)(s - h)) / (2.0 * h) : ((*this)(s + h) - (*this)(s)) / h;
  return 1.0 / slope;
}

}  // namespace arpf
