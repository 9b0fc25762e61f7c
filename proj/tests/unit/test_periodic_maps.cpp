#include <doctest.h>

#include <cmath>
#include <numbers>

#include "arpf/periodic_map.hpp"
#include "oracles.hpp"

using namespace arpf;
using std::numbers::pi;

namespace {

// F_k by Simpson over [0, 2π] split at the map's breakpoints.
cplx simpson_coefficient(const PeriodicMap& f, int k) {
  std::vector<double> pts = {0.0};
  for (double b : f.breakpoints()) pts.push_back(b);
  pts.push_back(2 * pi);
  auto re = [&](double t) { return (f(t) * std::exp(cplx(0, -k * t))).real(); };
  auto im = [&](double t) { return (f(t) * std::exp(cplx(0, -k * t))).imag(); };
  // Evaluate each piece strictly inside so the jump value never enters.
  auto piece = [&](const std::function<double(double)>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double eps = 1e-13;
      s += oracle::simpson(g, pts[i] + eps, pts[i + 1] - eps, 4000);
    }
    return s / (2 * pi);
  };
  return {piece(re), piece(im)};
}

std::vector<PeriodicMap> builtin_maps() {
  return {PeriodicMap::complex_exponential(), PeriodicMap::cosine(1), PeriodicMap::cosine(3),
          PeriodicMap::universal_quantizer(), PeriodicMap::triangular_wave(),
          PeriodicMap::fourier_series({{1, cplx(0.3, 0.1)}, {-2, 0.25}, {3, cplx(0, -0.2)}})};
}

}  // namespace

TEST_CASE("evaluate") {
  CHECK(PeriodicMap::universal_quantizer()(0.0).real() == 1.0);
  CHECK(PeriodicMap::cosine(1)(pi).real() == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(PeriodicMap::universal_quantizer()(2.0).real() == -1.0);
  // q(t) = +1 where cos t = 0
  CHECK(PeriodicMap::universal_quantizer()(pi / 2).real() == 1.0);
  CHECK(PeriodicMap::universal_quantizer()(-pi / 2).real() == 1.0);
  const auto e = PeriodicMap::complex_exponential()(0.7);
  CHECK(e.real() == doctest::Approx(std::cos(0.7)));
  CHECK(e.imag() == doctest::Approx(std::sin(0.7)));
}

TEST_CASE("periodicity and bound") {
  for (const auto& f : builtin_maps()) {
    for (double t = -7.0; t < 7.0; t += 0.37) {
      CHECK(std::abs(f(t) - f(t + 2 * pi)) < 1e-12);
      CHECK(std::abs(f(t)) <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("fourier coefficient examples") {
  const auto q = PeriodicMap::universal_quantizer();
  CHECK(std::abs(q.coefficient(1) - 2 / pi) < 1e-15);
  CHECK(std::abs(q.coefficient(2)) == 0.0);
  CHECK(std::abs(PeriodicMap::cosine(1).coefficient(1) - 0.5) < 1e-15);
  CHECK(std::abs(q.coefficient(0)) == 0.0);
  CHECK(std::abs(q.coefficient(3) - cplx(-2 / (3 * pi))) < 1e-15);
  CHECK(std::abs(q.coefficient(-5) - cplx(2 / (5 * pi))) < 1e-15);
}

TEST_CASE("closed-form quantizer coefficients match the analytic piece integral") {
  const auto q = PeriodicMap::universal_quantizer();
  for (int k = -25; k <= 25; ++k) CHECK(std::abs(q.coefficient(k) - oracle::quantizer_coefficient(k)) < 1e-12);
}

TEST_CASE("property: closed-form coefficients match numerical integration for |k| <= 25") {
  for (const auto& f : builtin_maps()) {
    CAPTURE(f.name());
    for (int k = -25; k <= 25; ++k) {
      CAPTURE(k);
      CHECK(std::abs(f.coefficient(k) - simpson_coefficient(f, k)) < 1e-9);
      CHECK(std::abs(f.coefficient(k) - numerical_fourier_coefficient(f, k)) < 1e-9);
    }
  }
}

TEST_CASE("pf_inner_product examples") {
  const auto q = PeriodicMap::universal_quantizer();
  const auto c = PeriodicMap::cosine(1);
  CHECK(std::abs(pf_inner_product(q, c) - 2 / pi) < 1e-9);
  CHECK(std::abs(pf_inner_product(c, c) - 0.5) < 1e-12);
  CHECK(std::abs(pf_inner_product(q, q) - 1.0) < 1e-6);
}

TEST_CASE("property: <f, f> is real, nonnegative and equals the mean of |f|^2") {
  for (const auto& f : builtin_maps()) {
    CAPTURE(f.name());
    const cplx ff = pf_inner_product(f, f);
    std::vector<double> pts = {0.0};
    for (double b : f.breakpoints()) pts.push_back(b);
    pts.push_back(2 * pi);
    const double energy =
        oracle::simpson_pieces([&](double t) { return std::norm(f(t)); }, pts, 20000) / (2 * pi);
    CHECK(std::abs(ff.imag()) < 1e-12);
    CHECK(ff.real() >= 0.0);
    CHECK(ff.real() == doctest::Approx(energy).epsilon(1e-8));
  }
}

TEST_CASE("correlation values") {
  const auto q = PeriodicMap::universal_quantizer();
  const auto c = PeriodicMap::cosine(1);
  const auto qq = correlation(q, q);
  // The autocorrelation of sign(cos) is the triangle 1 - 2|t|/π on [-π, π],
  // which vanishes at π/2.
  CHECK(std::abs(qq(pi / 2).real() - oracle::quantizer_autocorrelation(pi / 2)) < 1e-12);
  CHECK(std::abs(qq(pi / 2)) < 1e-12);
  CHECK(qq(0.0).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(correlation(c, c)(0.0).real() == doctest::Approx(0.5).epsilon(1e-12));
  for (double t = -4.0; t <= 4.0; t += 0.173)
    CHECK(qq(t).real() == doctest::Approx(oracle::quantizer_autocorrelation(t)).epsilon(1e-12));
}

TEST_CASE("property: correlation is Lipschitz with constant min(L_f, L_g)") {
  const std::vector<std::pair<PeriodicMap, PeriodicMap>> pairs = {
      {PeriodicMap::universal_quantizer(), PeriodicMap::universal_quantizer()},
      {PeriodicMap::universal_quantizer(), PeriodicMap::cosine(1)},
      {PeriodicMap::cosine(1), PeriodicMap::cosine(1)},
      {PeriodicMap::complex_exponential(), PeriodicMap::complex_exponential()},
      {PeriodicMap::universal_quantizer(), PeriodicMap::triangular_wave()},
  };
  for (const auto& [f, g] : pairs) {
    CAPTURE(f.name());
    CAPTURE(g.name());
    const auto h = correlation(f, g);
    const double L = std::min(estimate_mean_lipschitz(f), estimate_mean_lipschitz(g));
    const int n = 20000;
    double slope = 0.0;
    for (int i = 0; i < n; ++i) {
      const double t = 2 * pi * i / n, dt = 2 * pi / n;
      slope = std::max(slope, std::abs(h(t + dt) - h(t)) / dt);
    }
    CHECK(slope <= L * 1.05);
  }
}

TEST_CASE("mean Lipschitz estimates") {
  const LipschitzGrid grid;
  const double lq = estimate_mean_lipschitz_numeric(PeriodicMap::universal_quantizer(), grid);
  CHECK(lq >= 4 / pi * 0.98);
  CHECK(lq <= 4 / pi * 1.02);
  const double le = estimate_mean_lipschitz_numeric(PeriodicMap::complex_exponential(), grid);
  CHECK(le == doctest::Approx(1.0).epsilon(0.02));
  const double lc = estimate_mean_lipschitz(PeriodicMap::cosine(1), grid);
  CHECK(lc >= 2 / pi - 1e-9);
  CHECK(lc <= 1.0 + 1e-9);
  CHECK(estimate_mean_lipschitz(PeriodicMap::universal_quantizer()) == doctest::Approx(4 / pi));
  // cos(3·): between (2/π)·3 and 3
  const double l3 = estimate_mean_lipschitz_numeric(PeriodicMap::cosine(3), grid);
  CHECK(l3 >= 6 / pi * 0.99);
  CHECK(l3 <= 3.0 * 1.01);
}

TEST_CASE("certified Lipschitz bounds dominate the estimates") {
  for (const auto& f : builtin_maps()) {
    CAPTURE(f.name());
    CHECK(estimate_mean_lipschitz_numeric(f) <= mean_lipschitz_bound(f) * 1.02);
  }
}

TEST_CASE("fourier_series validation") {
  CHECK_THROWS_AS(PeriodicMap::fourier_series({{0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(PeriodicMap::fourier_series({{1, 0.8}, {2, 0.8}}), std::invalid_argument);
  CHECK_NOTHROW(PeriodicMap::fourier_series({{1, 0.5}, {-1, 0.5}}));
}

TEST_CASE("names round-trip") {
  for (const char* n : {"exp", "cos", "cos3", "q", "tri"}) CHECK(PeriodicMap::from_name(n).name() == n);
  CHECK_THROWS(PeriodicMap::from_name("sawtooth"));
}

TEST_CASE("series truncation meets the tail tolerance") {
  const auto q = PeriodicMap::universal_quantizer();
  // Tail mass of Σ|Q_k|² beyond K is at most 8/(π²K); the adaptive sum of
  // |Q_k|² must be within the default tolerance of 1.
  const cplx s = cross_series(q, q, [](int) { return 1.0; });
  CHECK(std::abs(s.real() - 1.0) <= 2 * kSeriesTailTolerance);
  CHECK(cross_tail_bound(q, PeriodicMap::cosine(1), 2) == 0.0);
}

TEST_CASE("nonnegative cross spectra") {
  const auto q = PeriodicMap::universal_quantizer();
  CHECK(has_nonnegative_cross_spectrum(q, q));
  CHECK(has_nonnegative_cross_spectrum(q, PeriodicMap::cosine(1)));
  CHECK_FALSE(has_nonnegative_cross_spectrum(q, PeriodicMap::cosine(3)));
}
