#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arpf/features.hpp"
#include "arpf/kernels.hpp"
#include "arpf/philox.hpp"
#include "oracles.hpp"

using namespace arpf;
using std::numbers::pi;

namespace {

const auto kQ = PeriodicMap::universal_quantizer();
const auto kCos = PeriodicMap::cosine(1);

std::vector<double> along(double r, std::size_t d = 3) {
  std::vector<double> u(d, 0.0);
  u[0] = r * 0.6;
  u[1] = r * 0.8;
  return u;
}

}  // namespace

TEST_CASE("q.cos expected kernel is the scaled Gaussian kernel") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const auto s = FrequencySampler::gaussian(sigma, 3);
    const ExpectedKernel k(kQ, kCos, s);
    const std::vector<double> zero(3, 0.0);
    for (double r = 0.0; r <= 3.0; r += 0.25) {
      const double truth = 2 / pi * std::exp(-r * r / (2 * sigma * sigma));
      CHECK(std::abs(k(along(r), zero) - truth) < 1e-12);
      CHECK(std::abs(k.normalized_at_distance(r) - truth * pi / 2) < 1e-12);
    }
  }
}

TEST_CASE("expected kernel at x = y is <f, g>") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const std::vector<double> x = {0.3, -1.0, 2.0};
  for (const auto& [f, g] : {std::pair{kQ, kCos}, std::pair{kQ, kQ}, std::pair{kCos, kCos},
                             std::pair{PeriodicMap::triangular_wave(), kQ}}) {
    const ExpectedKernel k(f, g, s);
    CHECK(std::abs(k(x, x) - pf_inner_product(f, g)) < 2e-8);
    CHECK(std::abs(k.normalized(x, x) - 1.0) < 1e-9);
  }
}

TEST_CASE("quantized-quantized kernel matches the triangle-wave expectation") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const ExpectedKernel k(kQ, kQ, s);
  for (int i = 0; i < 20; ++i) {
    const double r = 3.0 * i / 19.0;
    const double truth = oracle::gaussian_expectation(oracle::triangle, r);
    CAPTURE(r);
    CHECK(std::abs(k.at_distance(r).real() - truth) < 1e-6);
    CHECK(std::abs(distorted_qq_closed_form(s, r) - truth) < 1e-8);
  }
  // Near the origin the kernel is linear with slope 2√2 π^{-3/2}.
  const double linear = 1 - 2 * std::sqrt(2.0) * std::pow(pi, -1.5) * 0.5;
  CHECK(std::abs(distorted_qq_closed_form(s, 0.5) - linear) < 1e-6);
  CHECK(std::abs(k.at_distance(0.5).real() - linear) < 1e-6);
  CHECK(distorted_qq_closed_form(s, 0.5) == doctest::Approx(0.7460254563).epsilon(1e-9));
}

TEST_CASE("distorted kernel examples") {
  const auto s = FrequencySampler::gaussian(1.0, 2);
  CHECK(distorted_qq_closed_form(s, 0.0) == 1.0);
  CHECK(std::abs(distorted_qq_closed_form(s, 0.5) - ExpectedKernel(kQ, kQ, s).at_distance(0.5).real()) < 1e-6);
  // Bandwidth enters only through r/σ.
  CHECK(distorted_qq_closed_form(FrequencySampler::gaussian(2.0, 2), 1.0) ==
        doctest::Approx(distorted_qq_closed_form(s, 0.5)).epsilon(1e-14));
  CHECK_THROWS_AS(distorted_qq_closed_form(FrequencySampler::cauchy(1.0, 2), 0.5), std::invalid_argument);
  // Gauss-Hermite only converges like 1/n on the kinked integrand.
  double err101 = 0.0, err201 = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 3.0 * i / 19.0, exact = distorted_qq_closed_form(s, r);
    err101 = std::max(err101, std::abs(distorted_qq_gauss_hermite(s, r, 101) - exact));
    err201 = std::max(err201, std::abs(distorted_qq_gauss_hermite(s, r) - exact));
  }
  CHECK(err201 < 1e-2);
  CHECK(err201 < err101);
}

TEST_CASE("gauss-hermite rule integrates polynomials exactly") {
  CHECK(gauss_hermite(201).weights.size() == 201);
  double total = 0.0;
  for (double w : gauss_hermite(201).weights) total += w;
  CHECK(total == doctest::Approx(std::sqrt(pi)).epsilon(1e-12));
  const auto rule = gauss_hermite(20);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0, m3 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * x * x;
    m3 += w * x * x * x;
    m4 += w * x * x * x * x;
  }
  CHECK(m0 == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(std::sqrt(pi) / 2).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3 * std::sqrt(pi) / 4).epsilon(1e-13));
  CHECK(std::abs(m3) < 1e-12);
}

TEST_CASE("normalized kernels") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const ExpectedKernel k(kQ, kCos, s);
  for (double r = 0.0; r <= 3.0; r += 0.3) CHECK(std::abs(k.normalized_at_distance(r) - std::exp(-r * r / 2)) < 1e-12);
  const ExpectedKernel k3(kQ, PeriodicMap::cosine(3), s);
  // F_{±3} = -2/(3π), G_{±3} = 1/2: the pairing probes the kernel at 3u.
  CHECK(std::abs(k3.pair_inner_product() + 2 / (3 * pi)) < 1e-12);
  for (double r = 0.0; r <= 1.5; r += 0.1) CHECK(std::abs(k3.normalized_at_distance(r) - std::exp(-4.5 * r * r)) < 1e-12);
  const ExpectedKernel orth(kQ, PeriodicMap::cosine(2), s);
  CHECK_THROWS_AS(orth.normalized_at_distance(0.1), OrthogonalPair);
}

TEST_CASE("laplace kernel series") {
  const auto s = FrequencySampler::cauchy(1.5, 2);
  const ExpectedKernel k(kQ, kCos, s);
  const std::vector<double> x = {0.5, -0.25}, y = {0.0, 0.5};
  CHECK(std::abs(k.normalized(x, y) - std::exp(-1.25 / 1.5)) < 1e-12);
  CHECK_THROWS_AS(k(x, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("property: conjugate symmetry of the scale mixture") {
  const auto s = FrequencySampler::gaussian(1.0, 2);
  const auto series = PeriodicMap::fourier_series({{1, cplx(0.3, 0.2)}, {-1, cplx(0.1, -0.3)}, {2, cplx(0, 0.2)}});
  const std::vector<PeriodicMap> maps = {kQ, kCos, PeriodicMap::complex_exponential(), series,
                                         PeriodicMap::triangular_wave()};
  PhiloxStream rng(1, 0);
  for (const auto& f : maps)
    for (const auto& g : maps) {
      const ExpectedKernel fg(f, g, s), gf(g, f, s);
      for (int t = 0; t < 5; ++t) {
        const std::vector<double> x = {rng.normal(), rng.normal()}, y = {rng.normal(), rng.normal()};
        CHECK(std::abs(fg(x, y) - std::conj(gf(y, x))) < 1e-8);
      }
    }
}

TEST_CASE("property: autocorrelation kernels are bounded and decreasing") {
  const auto s = FrequencySampler::gaussian(1.0, 2);
  for (const auto& f : {kQ, kCos, PeriodicMap::triangular_wave(), PeriodicMap::complex_exponential()}) {
    const ExpectedKernel k(f, f, s);
    double prev = k.at_distance(0.0).real();
    CHECK(prev <= 1.0 + 1e-12);
    for (double r = 0.05; r <= 4.0; r += 0.05) {
      const cplx v = k.at_distance(r);
      CHECK(std::abs(v.imag()) < 1e-12);
      CHECK(v.real() >= -1e-12);
      CHECK(v.real() <= prev + 1e-12);
      prev = v.real();
    }
  }
}

TEST_CASE("distance map values") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const DistanceMap qc(kQ, kCos, s), cc(kCos, kCos, s), qq(kQ, kQ, s);
  CHECK(std::abs(qc(0.0) - (1.5 - 4 / pi)) < 1e-9);
  CHECK(qc.bias() == doctest::Approx(0.2268).epsilon(1e-3));
  for (double r = 0.0; r <= 3.0; r += 0.1) {
    CHECK(std::abs(cc(r) - (1 - std::exp(-r * r / 2))) < 1e-12);
    CHECK(std::abs(qc(r) - (1.5 - 4 / pi * std::exp(-r * r / 2))) < 1e-12);
  }
  CHECK(std::abs(cc(0.0)) < 1e-12);
  CHECK(std::abs(qq(0.0)) < 1e-7);
  CHECK(cc.limit() == doctest::Approx(1.0));
  CHECK_THROWS_AS(cc(-0.1), std::domain_error);
}

TEST_CASE("distance map inversion") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const DistanceMap qc(kQ, kCos, s), cc(kCos, kCos, s), qq(kQ, kQ, s);
  CHECK(std::abs(qc.invert(1.5 - 4 / pi)) < 1e-12);
  CHECK(std::abs(cc.invert(1 - std::exp(-0.5)) - 1.0) < 1e-12);
  for (const DistanceMap* dm : {&qc, &cc, &qq}) {
    REQUIRE(dm->invertible());
    for (double r = 0.1; r <= 2.0 + 1e-12; r += 0.05) CHECK(std::abs(dm->invert((*dm)(r)) - r) < 1e-8);
  }
  CHECK_THROWS_AS(qc.invert(0.1), std::domain_error);
  CHECK_THROWS_AS(cc.invert(1.0), std::domain_error);
  CHECK_THROWS_AS(cc.invert(-0.5), std::domain_error);
  const DistanceMap bad(kQ, PeriodicMap::cosine(3), s);
  CHECK_FALSE(bad.invertible());
  CHECK_THROWS_AS(bad.invert(0.5), std::logic_error);
  // Sensitivity is 1/γ'(s); for cos.cos γ'(s) = s e^{-s²/2}.
  CHECK(cc.sensitivity(1.0) == doctest::Approx(1 / std::exp(-0.5)).epsilon(1e-5));
}

TEST_CASE("property: embedding distances match the distance map on average") {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const DistanceMap qc(kQ, kCos, s);
  PhiloxStream rng(2, 0);
  for (int p = 0; p < 10; ++p) {
    std::vector<double> x(3), y(3);
    for (int i = 0; i < 3; ++i) {
      x[i] = 0.7 * rng.normal();
      y[i] = 0.7 * rng.normal();
    }
    double r = 0.0;
    for (int i = 0; i < 3; ++i) r += (x[i] - y[i]) * (x[i] - y[i]);
    r = std::sqrt(r);
    std::vector<double> d2;
    for (std::uint64_t t = 0; t < 1000; ++t) {
      const auto draw = std::make_shared<const RandomDraw>(s.draw(64, 100 * p + t));
      const auto zq = FeatureEmbedding(draw, kQ).embed(x);
      const auto zc = FeatureEmbedding(draw, kCos).embed(y);
      // ‖a - b‖² from the explicit difference of the dense vectors.
      const auto a = zq.to_real();
      const auto& b = zc.real();
      double acc = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
      const double identity = inner_product(zq, zq).real() + inner_product(zc, zc).real() -
                              2 * inner_product(zq, zc).real();
      CHECK(acc == doctest::Approx(identity).epsilon(1e-12));
      d2.push_back(acc);
    }
    const auto ms = oracle::mean_se(d2);
    CHECK(std::abs(ms.mean - (1.5 - 4 / pi * std::exp(-r * r / 2))) <= 4 * ms.se);
  }
}
