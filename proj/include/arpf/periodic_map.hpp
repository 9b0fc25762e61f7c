#pragma once

// 2π-periodic, zero-mean maps bounded by one, described both pointwise and
// through their Fourier coefficients F_k = (1/2π) ∫ f(t) e^{-ikt} dt.

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arpf {

using cplx = std::complex<double>;

class PeriodicMap {
 public:
  enum class Kind {
    ComplexExponential,  // e^{it}
    Cosine,              // cos(s t), s >= 1
    UniversalQuantizer,  // sign(cos t), +1 where cos t == 0
    TriangularWave,      // autocorrelation of the universal quantizer
    FourierSeries,       // finite trigonometric polynomial
  };

  struct Term {
    int k;
    cplx coefficient;
  };

  static PeriodicMap complex_exponential();
  static PeriodicMap cosine(int scale = 1);
  static PeriodicMap universal_quantizer();
  static PeriodicMap triangular_wave();
  /// Throws std::invalid_argument if a nonzero k = 0 term is given, or if the
  /// sampled sup-norm exceeds 1 + 1e-9.
  static PeriodicMap fourier_series(std::vector<Term> terms);

  Kind kind() const noexcept { return kind_; }
  int scale() const noexcept { return scale_; }
  bool is_real() const noexcept { return real_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  /// f(t); t is reduced modulo 2π.
  cplx operator()(double t) const;
  cplx coefficient(int k) const;

  /// Indices of the nonzero coefficients when there are finitely many.
  std::optional<std::vector<int>> finite_support() const;

  /// Envelope |F_k| <= amplitude / |k|^order valid for every k != 0, used to
  /// bound truncated series tails. Only meaningful for infinite supports.
  struct Decay {
    double amplitude;
    int order;
    bool odd_only;
  };
  std::optional<Decay> decay() const;

  /// Interior points of [0, 2π) where f or f' jumps.
  std::vector<double> breakpoints() const;

  std::string name() const;
  /// Inverse of name(): "exp", "cos", "cos3", "q", "tri".
  static PeriodicMap from_name(const std::string& name);

 private:
  PeriodicMap(Kind kind, int scale, bool real, std::vector<Term> terms = {})
      : kind_(kind), scale_(scale), real_(real), terms_(std::move(terms)) {}

  static PeriodicMap build_series(std::vector<Term> terms, double sup_slack);
  friend PeriodicMap correlation(const PeriodicMap&, const PeriodicMap&, double);

  Kind kind_;
  int scale_ = 1;
  bool real_ = true;
  std::vector<Term> terms_;
};

/// Default ℓ¹ tail tolerance for truncated series.
inline constexpr double kSeriesTailTolerance = 1e-8;

/// F_k by composite Gauss-Legendre over one period, split at discontinuities.
cplx numerical_fourier_coefficient(const PeriodicMap& f, int k);

/// Σ_k F_k G_k^* w(|k|), where w is nonincreasing in |k| with values in [0, 1].
/// Finite supports are summed exactly; otherwise the sum stops once the
/// analytic tail bound times w(K + 1) is below `tail_tol`.
cplx cross_series(const PeriodicMap& f, const PeriodicMap& g,
                  const std::function<double(int)>& weight,
                  double tail_tol = kSeriesTailTolerance);

/// Bound on Σ_{|k| > K} |F_k G_k|; zero for finite supports past their range.
double cross_tail_bound(const PeriodicMap& f, const PeriodicMap& g, int K);

/// ⟨f, g⟩ = (1/2π) ∫ f g^* = Σ_k F_k G_k^*.
cplx pf_inner_product(const PeriodicMap& f, const PeriodicMap& g,
                      double tail_tol = kSeriesTailTolerance);

/// h = f ∗ ḡ, with H_k = F_k G_k^*. Two quantizers give the exact triangular
/// wave; anything involving a finite support gives an exact FourierSeries;
/// other pairs are truncated at `tail_tol`.
PeriodicMap correlation(const PeriodicMap& f, const PeriodicMap& g,
                        double tail_tol = kSeriesTailTolerance);

struct LipschitzGrid {
  int t_points = 4096;
  int delta_points = 64;
  int offsets = 257;
  double delta_min = 0.09817477042468103;  // π/32
};

/// Mean Lipschitz constant: sup over δ of (1/δ) E_t sup_{|r|<=δ} |f(t+r) - f(t)|.
/// Exact for the quantizer (4/π) and the complex exponential (1); grid estimate
/// otherwise.
double estimate_mean_lipschitz(const PeriodicMap& f, const LipschitzGrid& grid = {});
/// Grid estimate regardless of kind.
double estimate_mean_lipschitz_numeric(const PeriodicMap& f, const LipschitzGrid& grid = {});

/// Certified upper bound on the mean Lipschitz constant: 4/π for q, |k| for
/// e^{ik·} and cos(k·), 2/π for the triangular wave, Σ|k||F_k| for series.
double mean_lipschitz_bound(const PeriodicMap& f);

/// True when every F_k G_k^* is real and nonnegative (sufficient for the
/// expected kernel to be positive definite).
bool has_nonnegative_cross_spectrum(const PeriodicMap& f, const PeriodicMap& g,
                                    int max_index = 4096);

}  // namespace arpf
