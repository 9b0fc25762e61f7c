#include "arpf/periodic_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "arpf/quadrature.hpp"

namespace arpf {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double reduce_phase(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r;
}

double quantizer_coefficient(int k) {
  if (k % 2 == 0) return 0.0;
  const int half = (k - 1) / 2;  // exact: k - 1 is even
  const double sign = (half & 1) ? -1.0 : 1.0;
  return sign * 2.0 / (k * kPi);
}

double triangular_coefficient(int k) {
  if (k % 2 == 0) return 0.0;
  return 4.0 / (kPi * kPi * double(k) * double(k));
}

bool conjugate_symmetric(const std::vector<PeriodicMap::Term>& terms) {
  std::map<int, cplx> by_index;
  for (const auto& t : terms) by_index[t.k] += t.coefficient;
  for (const auto& [k, c] : by_index) {
    auto it = by_index.find(-k);
    const cplx mirror = it == by_index.end() ? cplx{} : it->second;
    if (std::abs(mirror - std::conj(c)) > 1e-14 * (1.0 + std::abs(c))) return false;
  }
  return true;
}

std::vector<PeriodicMap::Term> merge_terms(std::vector<PeriodicMap::Term> terms) {
  std::map<int, cplx> by_index;
  for (const auto& t : terms) by_index[t.k] += t.coefficient;
  std::vector<PeriodicMap::Term> out;
  for (const auto& [k, c] : by_index)
    if (c != cplx{}) out.push_back({k, c});
  return out;
}

}  // namespace

PeriodicMap PeriodicMap::complex_exponential() {
  return PeriodicMap(Kind::ComplexExponential, 1, false);
}

PeriodicMap PeriodicMap::cosine(int scale) {
  if (scale < 1) throw std::invalid_argument("cosine: scale must be a positive integer");
  return PeriodicMap(Kind::Cosine, scale, true);
}

PeriodicMap PeriodicMap::universal_quantizer() {
  return PeriodicMap(Kind::UniversalQuantizer, 1, true);
}

PeriodicMap PeriodicMap::triangular_wave() {
  return PeriodicMap(Kind::TriangularWave, 1, true);
}

PeriodicMap PeriodicMap::fourier_series(std::vector<Term> terms) {
  return build_series(std::move(terms), 1e-9);
}

PeriodicMap PeriodicMap::build_series(std::vector<Term> terms, double sup_slack) {
  terms = merge_terms(std::move(terms));
  for (const auto& t : terms)
    if (t.k == 0) throw std::invalid_argument("fourier_series: coefficient at k = 0 must vanish");
  PeriodicMap map(Kind::FourierSeries, 1, conjugate_symmetric(terms), std::move(terms));
  constexpr int kProbe = 4096;
  for (int i = 0; i < kProbe; ++i) {
    if (std::abs(map(kTwoPi * i / kProbe)) > 1.0 + sup_slack)
      throw std::invalid_argument("fourier_series: sup-norm exceeds 1");
  }
  return map;
}

cplx PeriodicMap::operator()(double t) const {
  switch (kind_) {
    case Kind::ComplexExponential:
      return std::polar(1.0, reduce_phase(t));
    case Kind::Cosine:
      return std::cos(scale_ * reduce_phase(t));
    case Kind::UniversalQuantizer:
      return std::cos(t) >= 0.0 ? 1.0 : -1.0;
    case Kind::TriangularWave:
      return 2.0 * std::abs(reduce_phase(t) - kPi) / kPi - 1.0;
    case Kind::FourierSeries: {
      const double r = reduce_phase(t);
      cplx sum{};
      for (const auto& term : terms_) sum += term.coefficient * std::polar(1.0, term.k * r);
      return sum;
    }
  }
  return {};
}

cplx PeriodicMap::coefficient(int k) const {
  switch (kind_) {
    case Kind::ComplexExponential:
      return k == 1 ? 1.0 : 0.0;
    case Kind::Cosine:
      return std::abs(k) == scale_ ? 0.5 : 0.0;
    case Kind::UniversalQuantizer:
      return quantizer_coefficient(k);
    case Kind::TriangularWave:
      return triangular_coefficient(k);
    case Kind::FourierSeries: {
      auto it = std::lower_bound(terms_.begin(), terms_.end(), k,
                                 [](const Term& t, int key) { return t.k < key; });
      return (it != terms_.end() && it->k == k) ? it->coefficient : cplx{};
    }
  }
  return {};
}

std::optional<std::vector<int>> PeriodicMap::finite_support() const {
  switch (kind_) {
    case Kind::ComplexExponential:
      return std::vector<int>{1};
    case Kind::Cosine:
      return std::vector<int>{-scale_, scale_};
    case Kind::FourierSeries: {
      std::vector<int> ks;
      for (const auto& t : terms_) ks.push_back(t.k);
      return ks;
    }
    default:
      return std::nullopt;
  }
}

std::optional<PeriodicMap::Decay> PeriodicMap::decay() const {
  switch (kind_) {
    case Kind::UniversalQuantizer:
      return Decay{2.0 / kPi, 1, true};
    case Kind::TriangularWave:
      return Decay{4.0 / (kPi * kPi), 2, true};
    default:
      return std::nullopt;
  }
}

std::vector<double> PeriodicMap::breakpoints() const {
  switch (kind_) {
    case Kind::UniversalQuantizer:
      return {0.5 * kPi, 1.5 * kPi};
    case Kind::TriangularWave:
      return {kPi};
    default:
      return {};
  }
}

std::string PeriodicMap::name() const {
  switch (kind_) {
    case Kind::ComplexExponential:
      return "exp";
    case Kind::Cosine:
      return scale_ == 1 ? "cos" : "cos" + std::to_string(scale_);
    case Kind::UniversalQuantizer:
      return "q";
    case Kind::TriangularWave:
      return "tri";
    case Kind::FourierSeries:
      return "series";
  }
  return "?";
}

PeriodicMap PeriodicMap::from_name(const std::string& name) {
  if (name == "exp") return complex_exponential();
  if (name == "q") return universal_quantizer();
  if (name == "tri") return triangular_wave();
  if (name.rfind("cos", 0) == 0) {
    if (name.size() == 3) return cosine(1);
    return cosine(std::stoi(name.substr(3)));
  }
  throw std::invalid_argument("unknown periodic map '" + name + "'");
}

cplx numerical_fourier_coefficient(const PeriodicMap& f, int k) {
  const auto breaks = f.breakpoints();
  const cplx integral = quad::integrate_piecewise(
      [&](double t) { return f(t) * std::polar(1.0, -k * t); }, 0.0, kTwoPi, breaks, 32,
      8 + 2 * std::abs(k));
  return integral / kTwoPi;
}

double cross_tail_bound(const PeriodicMap& f, const PeriodicMap& g, int K) {
  auto exact_tail = [&](const std::vector<int>& support) {
    double tail = 0.0;
    for (int k : support)
      if (std::abs(k) > K) tail += std::abs(f.coefficient(k) * std::conj(g.coefficient(k)));
    return tail;
  };
  if (auto s = f.finite_support()) return exact_tail(*s);
  if (auto s = g.finite_support()) return exact_tail(*s);

  const auto df = *f.decay();
  const auto dg = *g.decay();
  const double amp = df.amplitude * dg.amplitude;
  const int p = df.order + dg.order;
  if (df.odd_only || dg.odd_only) {
    // Σ_{odd k > K} k^{-p} <= ½ ∫_{K-1}^∞ x^{-p} dx, doubled for negative k.
    if (K <= 1) return std::numeric_limits<double>::infinity();
    return amp * std::pow(K - 1.0, 1 - p) / (p - 1);
  }
  if (K < 1) return std::numeric_limits<double>::infinity();
  return 2.0 * amp * std::pow(double(K), 1 - p) / (p - 1);
}

namespace {

template <class W>
cplx cross_series_impl(const PeriodicMap& f, const PeriodicMap& g, W&& weight, double tail_tol) {
  if (!(tail_tol > 0.0)) throw std::invalid_argument("cross_series: tail tolerance must be positive");

  auto finite = [&](const std::vector<int>& support) {
    cplx sum{};
    for (int k : support) sum += f.coefficient(k) * std::conj(g.coefficient(k)) * weight(std::abs(k));
    return sum;
  };
  if (auto s = f.finite_support()) return finite(*s);
  if (auto s = g.finite_support()) return finite(*s);

  const bool odd_only = f.decay()->odd_only || g.decay()->odd_only;
  const int step = odd_only ? 2 : 1;
  // Kahan-compensated accumulation: the q·q series needs ~10^7 terms.
  cplx sum{}, comp{};
  for (int K = 1;; K += step) {
    const cplx term = (f.coefficient(K) * std::conj(g.coefficient(K)) +
                       f.coefficient(-K) * std::conj(g.coefficient(-K))) *
                      weight(K);
    const cplx y = term - comp;
    const cplx t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    const double w_next = weight(K + 1);
    if (w_next == 0.0 || cross_tail_bound(f, g, K) * w_next <= tail_tol) break;
    if (K > std::numeric_limits<int>::max() / 2)
      throw std::runtime_error("cross_series: truncation index overflow");
  }
  return sum;
}

}  // namespace

cplx cross_series(const PeriodicMap& f, const PeriodicMap& g,
                  const std::function<double(int)>& weight, double tail_tol) {
  return cross_series_impl(f, g, weight, tail_tol);
}

cplx pf_inner_product(const PeriodicMap& f, const PeriodicMap& g, double tail_tol) {
  return cross_series_impl(f, g, [](int) { return 1.0; }, tail_tol);
}

PeriodicMap correlation(const PeriodicMap& f, const PeriodicMap& g, double tail_tol) {
  using Kind = PeriodicMap::Kind;
  if (f.kind() == Kind::UniversalQuantizer && g.kind() == Kind::UniversalQuantizer)
    return PeriodicMap::triangular_wave();

  std::vector<PeriodicMap::Term> terms;
  auto add = [&](int k) {
    const cplx h = f.coefficient(k) * std::conj(g.coefficient(k));
    if (h != cplx{}) terms.push_back({k, h});
  };
  if (auto s = f.finite_support()) {
    for (int k : *s) add(k);
  } else if (auto s2 = g.finite_support()) {
    for (int k : *s2) add(k);
  } else {
    int K = 1;
    while (cross_tail_bound(f, g, K) > tail_tol) ++K;
    for (int k = -K; k <= K; ++k) add(k);
  }
  // The exact correlation is bounded by ‖f‖‖g‖ <= 1; truncation may add up
  // to tail_tol on top of that.
  return PeriodicMap::build_series(std::move(terms), 1e-9 + tail_tol);
}

double estimate_mean_lipschitz_numeric(const PeriodicMap& f, const LipschitzGrid& grid) {
  if (grid.t_points <= 0 || grid.delta_points <= 0 || grid.offsets <= 1 || !(grid.delta_min > 0.0))
    throw std::invalid_argument("estimate_mean_lipschitz: grid resolutions must be positive");

  const int nd = grid.delta_points;
  std::vector<double> ratio(nd, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int di = 0; di < nd; ++di) {
    const double delta = nd == 1 ? kPi
                                 : grid.delta_min *
                                       std::pow(kPi / grid.delta_min, double(di) / (nd - 1));
    double acc = 0.0;
    for (int i = 0; i < grid.t_points; ++i) {
      const double t = kTwoPi * i / grid.t_points;
      const cplx ft = f(t);
      double worst = 0.0;
      for (int j = 0; j < grid.offsets; ++j) {
        const double r = delta * (2.0 * j / (grid.offsets - 1) - 1.0);
        worst = std::max(worst, std::abs(f(t + r) - ft));
      }
      acc += worst;
    }
    ratio[di] = acc / grid.t_points / delta;
  }
  return *std::max_element(ratio.begin(), ratio.end());
}

double estimate_mean_lipschitz(const PeriodicMap& f, const LipschitzGrid& grid) {
  if (grid.t_points <= 0 || grid.delta_points <= 0 || grid.offsets <= 1 || !(grid.delta_min > 0.0))
    throw std::invalid_argument("estimate_mean_lipschitz: grid resolutions must be positive");
  switch (f.kind()) {
    case PeriodicMap::Kind::UniversalQuantizer:
      return 4.0 / kPi;
    case PeriodicMap::Kind::ComplexExponential:
      return 1.0;
    default:
      return estimate_mean_lipschitz_numeric(f, grid);
  }
}

double mean_lipschitz_bound(const PeriodicMap& f) {
  switch (f.kind()) {
    case PeriodicMap::Kind::UniversalQuantizer:
      return 4.0 / kPi;
    case PeriodicMap::Kind::ComplexExponential:
      return 1.0;
    case PeriodicMap::Kind::Cosine:
      return f.scale();
    case PeriodicMap::Kind::TriangularWave:
      return 2.0 / kPi;
    case PeriodicMap::Kind::FourierSeries: {
      double bound = 0.0;
      for (const auto& t : f.terms()) bound += std::abs(t.k) * std::abs(t.coefficient);
      return bound;
    }
  }
  return std::numeric_limits<double>::infinity();
}

bool has_nonnegative_cross_spectrum(const PeriodicMap& f, const PeriodicMap& g, int max_index) {
  auto ok = [&](int k) {
    const cplx h = f.coefficient(k) * std::conj(g.coefficient(k));
    return h.real() >= 0.0 && std::abs(h.imag()) <= 1e-15 * (1.0 + std::abs(h));
  };
  std::vector<int> ks;
  if (auto s = f.finite_support()) ks = *s;
  else if (auto s2 = g.finite_support()) ks = *s2;
  else
    for (int k = -max_index; k <= max_index; ++k) ks.push_back(k);
  return std::all_of(ks.begin(), ks.end(), ok);
}

}  // namespace arpf
