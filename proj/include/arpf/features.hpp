#pragma once

// Random periodic features z_f(x) = (1/√m) f(Ωᵀx + ξ).
//
// Binary features (universal quantizer) are bit-packed LSB-first: bit j of the
// stream lives in byte j / 8 at position j % 8, and a set bit encodes +1/√m.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "arpf/periodic_map.hpp"
#include "arpf/sampling.hpp"

namespace arpf {

enum class PayloadKind : std::uint8_t { DenseReal = 0, DenseComplex = 1, PackedBits = 2 };

struct PackedBits {
  std::size_t m = 0;
  std::vector<std::uint8_t> bytes;  // ⌈m/8⌉, padding bits zero

  bool bit(std::size_t j) const { return (bytes[j >> 3] >> (j & 7)) & 1u; }
  bool operator==(const PackedBits&) const = default;
};

class FeatureVector {
 public:
  using Payload = std::variant<std::vector<double>, std::vector<cplx>, PackedBits>;

  FeatureVector() = default;
  static FeatureVector dense_real(std::vector<double> values);
  static FeatureVector dense_complex(std::vector<cplx> values);
  static FeatureVector packed(PackedBits bits);

  PayloadKind kind() const noexcept { return static_cast<PayloadKind>(payload_.index()); }
  std::size_t size() const noexcept;
  /// 1/√m: the magnitude of one packed entry.
  double scale() const noexcept;

  const Payload& payload() const noexcept { return payload_; }
  const std::vector<double>& real() const { return std::get<0>(payload_); }
  const std::vector<cplx>& complex() const { return std::get<1>(payload_); }
  const PackedBits& bits() const { return std::get<2>(payload_); }

  /// Dense copy of any payload as complex values.
  std::vector<cplx> to_complex() const;
  /// Dense real copy; throws for complex payloads.
  std::vector<double> to_real() const;

  bool operator==(const FeatureVector&) const = default;

 private:
  explicit FeatureVector(Payload p) : payload_(std::move(p)) {}
  Payload payload_;
};

/// ±1 signs → PackedBits feature vector (bit = 1 for +1).
FeatureVector pack_bits(std::span<const int> signs);
std::vector<int> unpack_bits(const FeatureVector& v);

/// Expands packed bits to ±1/√m reals.
std::vector<double> unpack_to_real(const PackedBits& bits);

class FeatureEmbedding {
 public:
  FeatureEmbedding(std::shared_ptr<const RandomDraw> draw, PeriodicMap map);
  FeatureEmbedding(RandomDraw draw, PeriodicMap map)
      : FeatureEmbedding(std::make_shared<const RandomDraw>(std::move(draw)), std::move(map)) {}

  /// Copy with ξ replaced; intended for tests.
  FeatureEmbedding with_dither(std::vector<double> xi) const;

  const RandomDraw& draw() const noexcept { return *draw_; }
  std::shared_ptr<const RandomDraw> shared_draw() const noexcept { return draw_; }
  const PeriodicMap& map() const noexcept { return map_; }
  std::size_t m() const noexcept { return draw_->m; }
  std::size_t d() const noexcept { return draw_->d; }

  /// Ωᵀx + ξ.
  std::vector<double> project(std::span<const double> x) const;

  /// Quantizer → PackedBits, other real maps → DenseReal, complex → DenseComplex.
  FeatureVector embed(std::span<const double> x) const;

  /// Rows of a row-major n × d matrix; parallel over rows, ordered output.
  std::vector<FeatureVector> embed_batch(std::span<const double> rows, std::size_t n) const;

 private:
  std::shared_ptr<const RandomDraw> draw_;
  PeriodicMap map_;
};

/// ⟨a, b⟩ = Σ a_j b_j^*; throws std::invalid_argument on length mismatch.
cplx inner_product(const FeatureVector& a, const FeatureVector& b);

/// The four query/support pairings and their rescaling of ⟨a, b⟩.
enum class Table3Combo { CosCos, QCos, CosQ, QQ };

double combo_scale(Table3Combo c);
/// Expected payload kinds (left, right) for a combo.
std::pair<PayloadKind, PayloadKind> combo_payloads(Table3Combo c);
std::string combo_name(Table3Combo c);  // "cos_cos", "q_cos", "cos_q", "q_q"
Table3Combo combo_from_name(const std::string& name);

/// scale · Re⟨a, b⟩; throws std::invalid_argument when payload kinds do not
/// match the combo.
double rescaled_kernel_estimate(const FeatureVector& a, const FeatureVector& b, Table3Combo combo);

/// Feature file: "ARPZ", version u16, kind u8, m u32, count u64, payloads.
/// Dense entries are little-endian f64 (complex as re, im); packed rows take
/// ⌈m/8⌉ bytes each.
void save_features(const std::vector<FeatureVector>& rows, const std::string& path);
std::vector<FeatureVector> load_features(const std::string& path);

}  // namespace arpf
