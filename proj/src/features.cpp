#include "arpf/features.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "arpf/detail/binio.hpp"

namespace arpf {

namespace {

constexpr std::uint16_t kFeatureVersion = 1;

std::size_t packed_bytes(std::size_t m) { return (m + 7) / 8; }

double inv_sqrt(std::size_t m) { return 1.0 / std::sqrt(static_cast<double>(m)); }

// Σ_j s_j b_j with s_j = ±1 taken from the bit stream.
double signed_sum(const PackedBits& a, const std::vector<double>& b) {
  double plus = 0.0, total = 0.0;
  const std::size_t m = a.m;
  const std::size_t full = m / 8;
  for (std::size_t byte = 0; byte < full; ++byte) {
    unsigned bits = a.bytes[byte];
    const double* chunk = b.data() + byte * 8;
    for (int k = 0; k < 8; ++k) total += chunk[k];
    while (bits) {
      const int k = std::countr_zero(bits);
      plus += chunk[k];
      bits &= bits - 1;
    }
  }
  for (std::size_t j = full * 8; j < m; ++j) {
    total += b[j];
    if (a.bit(j)) plus += b[j];
  }
  return 2.0 * plus - total;
}

}  // namespace

FeatureVector FeatureVector::dense_real(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("feature vector must be nonempty");
  return FeatureVector(Payload(std::in_place_index<0>, std::move(values)));
}

FeatureVector FeatureVector::dense_complex(std::vector<cplx> values) {
  if (values.empty()) throw std::invalid_argument("feature vector must be nonempty");
  return FeatureVector(Payload(std::in_place_index<1>, std::move(values)));
}

FeatureVector FeatureVector::packed(PackedBits bits) {
  if (bits.m == 0 || bits.bytes.size() != packed_bytes(bits.m))
    throw std::invalid_argument("packed bits: size does not match m");
  if (bits.m % 8) bits.bytes.back() &= static_cast<std::uint8_t>((1u << (bits.m % 8)) - 1);
  return FeatureVector(Payload(std::in_place_index<2>, std::move(bits)));
}

std::size_t FeatureVector::size() const noexcept {
  switch (payload_.index()) {
    case 0: return std::get<0>(payload_).size();
    case 1: return std::get<1>(payload_).size();
    default: return std::get<2>(payload_).m;
  }
}

double FeatureVector::scale() const noexcept { return size() ? inv_sqrt(size()) : 0.0; }

std::vector<cplx> FeatureVector::to_complex() const {
  switch (kind()) {
    case PayloadKind::DenseReal: return {real().begin(), real().end()};
    case PayloadKind::DenseComplex: return complex();
    case PayloadKind::PackedBits: {
      const auto r = unpack_to_real(bits());
      return {r.begin(), r.end()};
    }
  }
  return {};
}

std::vector<double> FeatureVector::to_real() const {
  if (kind() == PayloadKind::DenseReal) return real();
  if (kind() == PayloadKind::PackedBits) return unpack_to_real(bits());
  throw std::invalid_argument("to_real: complex payload");
}

FeatureVector pack_bits(std::span<const int> signs) {
  PackedBits out;
  out.m = signs.size();
  out.bytes.assign(packed_bytes(out.m), 0);
  for (std::size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] != 1 && signs[j] != -1) throw std::invalid_argument("pack_bits: signs must be +1 or -1");
    if (signs[j] > 0) out.bytes[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7));
  }
  return FeatureVector::packed(std::move(out));
}

std::vector<int> unpack_bits(const FeatureVector& v) {
  const PackedBits& b = v.bits();
  std::vector<int> signs(b.m);
  for (std::size_t j = 0; j < b.m; ++j) signs[j] = b.bit(j) ? 1 : -1;
  return signs;
}

std::vector<double> unpack_to_real(const PackedBits& bits) {
  const double s = inv_sqrt(bits.m);
  std::vector<double> out(bits.m);
  for (std::size_t j = 0; j < bits.m; ++j) out[j] = bits.bit(j) ? s : -s;
  return out;
}

FeatureEmbedding::FeatureEmbedding(std::shared_ptr<const RandomDraw> draw, PeriodicMap map)
    : draw_(std::move(draw)), map_(std::move(map)) {
  if (!draw_ || draw_->m == 0 || draw_->omega.size() != draw_->d * draw_->m || draw_->xi.size() != draw_->m)
    throw std::invalid_argument("FeatureEmbedding: malformed draw");
}

FeatureEmbedding FeatureEmbedding::with_dither(std::vector<double> xi) const {
  if (xi.size() != draw_->m) throw std::invalid_argument("with_dither: length must equal m");
  auto copy = std::make_shared<RandomDraw>(*draw_);
  copy->xi = std::move(xi);
  return FeatureEmbedding(std::move(copy), map_);
}

std::vector<double> FeatureEmbedding::project(std::span<const double> x) const {
  const RandomDraw& w = *draw_;
  if (x.size() != w.d) throw std::invalid_argument("embed: dimension mismatch");
  std::vector<double> t(w.xi);
  for (std::size_t i = 0; i < w.d; ++i) {
    const double xi = x[i];
    const double* row = w.omega.data() + i * w.m;
    for (std::size_t j = 0; j < w.m; ++j) t[j] += xi * row[j];
  }
  return t;
}

FeatureVector FeatureEmbedding::embed(std::span<const double> x) const {
  const auto t = project(x);
  const std::size_t m = t.size();
  const double s = inv_sqrt(m);
  switch (map_.kind()) {
    case PeriodicMap::Kind::UniversalQuantizer: {
      PackedBits bits;
      bits.m = m;
      bits.bytes.assign(packed_bytes(m), 0);
      for (std::size_t j = 0; j < m; ++j)
        if (std::cos(t[j]) >= 0.0) bits.bytes[j >> 3] |= static_cast<std::uint8_t>(1u << (j & 7));
      return FeatureVector::packed(std::move(bits));
    }
    case PeriodicMap::Kind::Cosine: {
      const double k = map_.scale();
      std::vector<double> z(m);
      for (std::size_t j = 0; j < m; ++j) z[j] = s * std::cos(k * t[j]);
      return FeatureVector::dense_real(std::move(z));
    }
    case PeriodicMap::Kind::ComplexExponential: {
      std::vector<cplx> z(m);
      for (std::size_t j = 0; j < m; ++j) z[j] = std::polar(s, t[j]);
      return FeatureVector::dense_complex(std::move(z));
    }
    default:
      break;
  }
  if (map_.is_real()) {
    std::vector<double> z(m);
    for (std::size_t j = 0; j < m; ++j) z[j] = s * map_(t[j]).real();
    return FeatureVector::dense_real(std::move(z));
  }
  std::vector<cplx> z(m);
  for (std::size_t j = 0; j < m; ++j) z[j] = s * map_(t[j]);
  return FeatureVector::dense_complex(std::move(z));
}

std::vector<FeatureVector> FeatureEmbedding::embed_batch(std::span<const double> rows, std::size_t n) const {
  const std::size_t d = draw_->d;
  if (rows.size() != n * d) throw std::invalid_argument("embed_batch: expected n*d values");
  std::vector<FeatureVector> out(n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) out[i] = embed(rows.subspan(i * d, d));
  return out;
}

cplx inner_product(const FeatureVector& a, const FeatureVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner_product: length mismatch");
  const auto ka = a.kind(), kb = b.kind();
  using K = PayloadKind;
  if (ka == K::PackedBits && kb == K::PackedBits) {
    const auto& x = a.bits().bytes;
    const auto& y = b.bits().bytes;
    std::size_t differ = 0;
    for (std::size_t i = 0; i < x.size(); ++i) differ += std::popcount(static_cast<unsigned>(x[i] ^ y[i]));
    const double m = static_cast<double>(a.size());
    return (m - 2.0 * static_cast<double>(differ)) / m;
  }
  if (ka == K::PackedBits && kb == K::DenseReal) return a.scale() * signed_sum(a.bits(), b.real());
  if (ka == K::DenseReal && kb == K::PackedBits) return b.scale() * signed_sum(b.bits(), a.real());
  if (ka == K::DenseReal && kb == K::DenseReal) {
    const auto& x = a.real();
    const auto& y = b.real();
    double acc = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * y[j];
    return acc;
  }
  const auto x = a.to_complex();
  const auto y = b.to_complex();
  cplx acc{};
  for (std::size_t j = 0; j < x.size(); ++j) acc += x[j] * std::conj(y[j]);
  return acc;
}

double combo_scale(Table3Combo c) {
  switch (c) {
    case Table3Combo::CosCos: return 2.0;
    case Table3Combo::QCos:
    case Table3Combo::CosQ: return std::numbers::pi / 2.0;
    case Table3Combo::QQ: return 1.0;
  }
  return 0.0;
}

std::pair<PayloadKind, PayloadKind> combo_payloads(Table3Combo c) {
  using K = PayloadKind;
  switch (c) {
    case Table3Combo::CosCos: return {K::DenseReal, K::DenseReal};
    case Table3Combo::QCos: return {K::PackedBits, K::DenseReal};
    case Table3Combo::CosQ: return {K::DenseReal, K::PackedBits};
    case Table3Combo::QQ: return {K::PackedBits, K::PackedBits};
  }
  return {K::DenseReal, K::DenseReal};
}

std::string combo_name(Table3Combo c) {
  switch (c) {
    case Table3Combo::CosCos: return "cos_cos";
    case Table3Combo::QCos: return "q_cos";
    case Table3Combo::CosQ: return "cos_q";
    case Table3Combo::QQ: return "q_q";
  }
  return "?";
}

Table3Combo combo_from_name(const std::string& name) {
  for (auto c : {Table3Combo::CosCos, Table3Combo::QCos, Table3Combo::CosQ, Table3Combo::QQ})
    if (combo_name(c) == name) return c;
  throw std::invalid_argument("unknown combo: " + name);
}

double rescaled_kernel_estimate(const FeatureVector& a, const FeatureVector& b, Table3Combo combo) {
  const auto [ka, kb] = combo_payloads(combo);
  if (a.kind() != ka || b.kind() != kb)
    throw std::invalid_argument("rescaled_kernel_estimate: payloads do not match " + combo_name(combo));
  return combo_scale(combo) * inner_product(a, b).real();
}

void save_features(const std::vector<FeatureVector>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("save_features: no rows");
  const PayloadKind kind = rows.front().kind();
  const std::size_t m = rows.front().size();
  for (const auto& r : rows)
    if (r.kind() != kind || r.size() != m) throw std::invalid_argument("save_features: heterogeneous rows");

  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  binio::put_magic(os, "ARPZ");
  binio::put<std::uint16_t>(os, kFeatureVersion);
  binio::put<std::uint8_t>(os, static_cast<std::uint8_t>(kind));
  binio::put<std::uint32_t>(os, static_cast<std::uint32_t>(m));
  binio::put<std::uint64_t>(os, rows.size());
  for (const auto& r : rows) {
    switch (kind) {
      case PayloadKind::DenseReal:
        for (double v : r.real()) binio::put(os, v);
        break;
      case PayloadKind::DenseComplex:
        for (cplx v : r.complex()) {
          binio::put(os, v.real());
          binio::put(os, v.imag());
        }
        break;
      case PayloadKind::PackedBits:
        os.write(reinterpret_cast<const char*>(r.bits().bytes.data()),
                 static_cast<std::streamsize>(r.bits().bytes.size()));
        break;
    }
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

std::vector<FeatureVector> load_features(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  binio::expect_magic(is, "ARPZ");
  if (binio::get<std::uint16_t>(is) != kFeatureVersion) throw std::runtime_error("unsupported feature version");
  const auto kind_byte = binio::get<std::uint8_t>(is);
  if (kind_byte > 2) throw std::runtime_error("unknown payload kind");
  const auto kind = static_cast<PayloadKind>(kind_byte);
  const std::size_t m = binio::get<std::uint32_t>(is);
  const std::uint64_t count = binio::get<std::uint64_t>(is);
  if (m == 0) throw std::runtime_error("feature file with m = 0");

  std::vector<FeatureVector> rows;
  rows.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    switch (kind) {
      case PayloadKind::DenseReal: {
        std::vector<double> v(m);
        for (double& x : v) x = binio::get<double>(is);
        rows.push_back(FeatureVector::dense_real(std::move(v)));
        break;
      }
      case PayloadKind::DenseComplex: {
        std::vector<cplx> v(m);
        for (cplx& x : v) {
          const double re = binio::get<double>(is);
          x = {re, binio::get<double>(is)};
        }
        rows.push_back(FeatureVector::dense_complex(std::move(v)));
        break;
      }
      case PayloadKind::PackedBits: {
        PackedBits b;
        b.m = m;
        b.bytes.resize(packed_bytes(m));
        if (!is.read(reinterpret_cast<char*>(b.bytes.data()), static_cast<std::streamsize>(b.bytes.size())))
          throw std::runtime_error("unexpected end of file");
        rows.push_back(FeatureVector::packed(std::move(b)));
        break;
      }
    }
  }
  return rows;
}

}  // namespace arpf
