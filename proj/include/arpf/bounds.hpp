#pragma once

// Kolmogorov-entropy estimates for standard signal sets and the resulting
// feature counts. Universal constants are conventions (default 1) and all
// logarithms are natural.

#include <cstdint>
#include <string>

#include "arpf/periodic_map.hpp"
#include "arpf/sampling.hpp"

namespace arpf {

struct SignalModel {
  enum class Kind { Ball, SparseBall, UnionOfSubspaces };
  Kind kind = Kind::Ball;
  std::size_t d = 1;
  std::size_t s = 1;  // sparsity or subspace dimension
  double S = 1.0;     // number of subspaces
  double radius = 1.0;

  static SignalModel ball(std::size_t d, double radius = 1.0);
  static SignalModel sparse_ball(std::size_t d, std::size_t s, double radius = 1.0);
  static SignalModel union_of_subspaces(std::size_t d, std::size_t s, double S, double radius = 1.0);

  /// Throws std::invalid_argument unless 1 <= s <= d, S >= 1 and radius > 0.
  void validate() const;
  std::string describe() const;
};

struct EntropyConstants {
  double C = 1.0;        // sparse-ball constant
  double C_prime = 1.0;  // subspace and ball constant
};

/// Ball:               C' d ln(1 + 2r/η)
/// UnionOfSubspaces:   C' s ln(1 + 2r/η) + ln S
/// SparseBall:         C max_{1<=s'<=s} s' ln(d/s') · ln(1 + r/η)
double entropy_bound(const SignalModel& model, double eta, const EntropyConstants& constants = {});

/// 4 C_Λ (L_f + L_g + 2 min(L_f, L_g)) with certified mean Lipschitz bounds.
/// Throws std::domain_error when C_Λ is undefined.
double covering_scale(const FrequencySampler& sampler, const PeriodicMap& f, const PeriodicMap& g);

/// ⌈128 ε⁻² H_{ε/c}⌉ (at least 1).
std::uint64_t required_features_uniform(double eps, const SignalModel& model, const FrequencySampler& sampler,
                                        const PeriodicMap& f, const PeriodicMap& g,
                                        const EntropyConstants& constants = {});

/// Dedicated (q, cos) path: ⌈32π² ε⁻² H_{ε/((8+6π) C_Λ)}⌉.
std::uint64_t required_features_semi_quantized(double eps, const SignalModel& model,
                                               const FrequencySampler& sampler,
                                               const EntropyConstants& constants = {});

/// Complex-exponential instance: c = 16 C_Λ.
std::uint64_t required_features_rff(double eps, const SignalModel& model, const FrequencySampler& sampler,
                                    const EntropyConstants& constants = {});

/// 2 exp(-m ε² / 2).
double hoeffding_failure_prob(std::uint64_t m, double eps);

}  // namespace arpf
