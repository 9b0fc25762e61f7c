#include "arpf/sampling.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "arpf/detail/binio.hpp"
#include "arpf/philox.hpp"

namespace arpf {

namespace {
constexpr std::uint16_t kDrawVersion = 1;
}

FrequencySampler FrequencySampler::gaussian(double sigma, std::size_t d) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("sigma must be positive");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  return FrequencySampler(Kind::GaussianRBF, sigma, d);
}

FrequencySampler FrequencySampler::cauchy(double tau, std::size_t d) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (d == 0) throw std::invalid_argument("dimension must be positive");
  return FrequencySampler(Kind::CauchyLaplace, tau, d);
}

RandomDraw FrequencySampler::draw(std::size_t m, std::uint64_t seed) const {
  if (m == 0) throw std::invalid_argument("draw: m must be positive");
  RandomDraw out;
  out.d = d_;
  out.m = m;
  out.seed = seed;
  out.omega.resize(d_ * m);
  out.xi.resize(m);
  const double inv = 1.0 / param_;
  const bool gauss = kind_ == Kind::GaussianRBF;
  const auto cols = static_cast<std::int64_t>(m);

#pragma omp parallel for schedule(static)
  for (std::int64_t j = 0; j < cols; ++j) {
    PhiloxStream rng(seed, static_cast<std::uint64_t>(j));
    for (std::size_t i = 0; i < d_; ++i)
      out.omega[i * m + j] = inv * (gauss ? rng.normal() : rng.cauchy());
    double phase = 2.0 * std::numbers::pi * rng.uniform_open();
    if (phase >= 2.0 * std::numbers::pi) phase = 0.0;
    out.xi[j] = phase;
  }
  return out;
}

double FrequencySampler::norm(std::span<const double> u) const {
  double acc = 0.0;
  if (kind_ == Kind::GaussianRBF) {
    for (double v : u) acc += v * v;
    return std::sqrt(acc);
  }
  for (double v : u) acc += std::abs(v);
  return acc;
}

double FrequencySampler::distance(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != y.size()) throw std::invalid_argument("distance: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    acc += kind_ == Kind::GaussianRBF ? diff * diff : std::abs(diff);
  }
  return kind_ == Kind::GaussianRBF ? std::sqrt(acc) : acc;
}

double FrequencySampler::profile(double r) const {
  if (kind_ == Kind::GaussianRBF) return std::exp(-0.5 * (r / param_) * (r / param_));
  return std::exp(-std::abs(r) / param_);
}

double FrequencySampler::analytic_kernel(std::span<const double> u) const {
  if (u.size() != d_) throw std::invalid_argument("analytic_kernel: dimension mismatch");
  return profile(norm(u));
}

std::optional<double> FrequencySampler::c_lambda() const {
  if (kind_ == Kind::GaussianRBF) return 1.0 / param_;
  return std::nullopt;
}

std::string FrequencySampler::spec() const {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, param_);
  (void)ec;
  return std::string(kind_ == Kind::GaussianRBF ? "gaussian:" : "cauchy:") + std::string(buf, end);
}

FrequencySampler FrequencySampler::from_spec(const std::string& spec, std::size_t d) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("sampler spec must be kind:param");
  const std::string kind = spec.substr(0, colon);
  double param = 0.0;
  const char* first = spec.data() + colon + 1;
  const char* last = spec.data() + spec.size();
  auto [ptr, ec] = std::from_chars(first, last, param);
  if (ec != std::errc{} || ptr != last) throw std::invalid_argument("bad sampler parameter: " + spec);
  if (kind == "gaussian") return gaussian(param, d);
  if (kind == "cauchy") return cauchy(param, d);
  throw std::invalid_argument("unknown sampler kind: " + kind);
}

void save_draw(const RandomDraw& draw, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  binio::put_magic(os, "ARPF");
  binio::put<std::uint16_t>(os, kDrawVersion);
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(draw.d));
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(draw.m));
  binio::put<std::uint64_t>(os, draw.seed);
  for (double v : draw.omega) binio::put(os, v);
  for (double v : draw.xi) binio::put(os, v);
  if (!os) throw std::runtime_error("write failed: " + path);
}

RandomDraw load_draw(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  binio::expect_magic(is, "ARPF");
  const auto version = binio::get<std::uint16_t>(is);
  if (version != kDrawVersion) throw std::runtime_error("unsupported draw version");
  RandomDraw draw;
  draw.d = binio::get<std::uint32_t>(is);
  draw.m = binio::get<std::uint32_t>(is);
  draw.seed = binio::get<std::uint64_t>(is);
  if (draw.d == 0 || draw.m == 0) throw std::runtime_error("empty draw in " + path);
  draw.omega.resize(draw.d * draw.m);
  draw.xi.resize(draw.m);
  for (double& v : draw.omega) v = binio::get<double>(is);
  for (double& v : draw.xi) v = binio::get<double>(is);
  return draw;
}

}  // namespace arpf
