#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace arpf {

/// Projection matrix Ω (d × m, row-major) and dither ξ ∈ [0, 2π)^m.
struct RandomDraw {
  std::size_t d = 0;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::vector<double> omega;  // omega[i * m + j] = (ω_j)_i
  std::vector<double> xi;

  double at(std::size_t i, std::size_t j) const { return omega[i * m + j]; }

  bool operator==(const RandomDraw&) const = default;
};

/// File layout: "ARPF", version u16, d u32, m u32, seed u64, Ω row-major f64,
/// ξ f64; little-endian throughout.
void save_draw(const RandomDraw& draw, const std::string& path);
RandomDraw load_draw(const std::string& path);

class FrequencySampler {
 public:
  enum class Kind { GaussianRBF, CauchyLaplace };

  /// Entries i.i.d. N(0, 1/σ²); paired kernel exp(-‖u‖₂² / 2σ²).
  static FrequencySampler gaussian(double sigma, std::size_t d);
  /// Entries i.i.d. Cauchy(0, 1/τ); paired kernel exp(-‖u‖₁ / τ).
  static FrequencySampler cauchy(double tau, std::size_t d);

  Kind kind() const noexcept { return kind_; }
  double bandwidth() const noexcept { return param_; }
  std::size_t dimension() const noexcept { return d_; }

  /// Column j is generated from its own Philox substream (seed, j), so the
  /// result does not depend on the number of threads.
  RandomDraw draw(std::size_t m, std::uint64_t seed) const;

  /// κ₀(u); throws std::invalid_argument on a dimension mismatch.
  double analytic_kernel(std::span<const double> u) const;
  /// κ₀ as a function of the sampler's norm of u (ℓ₂ or ℓ₁).
  double profile(double r) const;
  /// ℓ₂ for GaussianRBF, ℓ₁ for CauchyLaplace.
  double norm(std::span<const double> u) const;
  double distance(std::span<const double> x, std::span<const double> y) const;

  /// C_Λ with E|ωᵀa| <= C_Λ ‖a‖₂; empty for Cauchy (no first moment).
  std::optional<double> c_lambda() const;

  /// "gaussian:1.5" or "cauchy:1.5".
  std::string spec() const;
  static FrequencySampler from_spec(const std::string& spec, std::size_t d);

  bool operator==(const FrequencySampler&) const = default;

 private:
  FrequencySampler(Kind kind, double param, std::size_t d) : kind_(kind), param_(param), d_(d) {}

  Kind kind_;
  double param_;
  std::size_t d_;
};

}  // namespace arpf
