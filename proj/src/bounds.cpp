#include "arpf/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace arpf {

namespace {

void check_eps(double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
}

double c_lambda_or_throw(const FrequencySampler& sampler) {
  const auto c = sampler.c_lambda();
  if (!c) throw std::domain_error("C_Lambda is undefined for " + sampler.spec());
  return *c;
}

std::uint64_t feature_count(double value) {
  if (!std::isfinite(value) || value >= 1.8e19) throw std::overflow_error("feature count overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

}  // namespace

SignalModel SignalModel::ball(std::size_t d, double radius) {
  SignalModel m{Kind::Ball, d, d, 1.0, radius};
  m.validate();
  return m;
}

SignalModel SignalModel::sparse_ball(std::size_t d, std::size_t s, double radius) {
  SignalModel m{Kind::SparseBall, d, s, 1.0, radius};
  m.validate();
  return m;
}

SignalModel SignalModel::union_of_subspaces(std::size_t d, std::size_t s, double S, double radius) {
  SignalModel m{Kind::UnionOfSubspaces, d, s, S, radius};
  m.validate();
  return m;
}

void SignalModel::validate() const {
  if (d < 1 || s < 1 || s > d) throw std::invalid_argument("signal model needs 1 <= s <= d");
  if (!(S >= 1.0)) throw std::invalid_argument("signal model needs S >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("signal model needs radius > 0");
}

std::string SignalModel::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Ball: os << "ball(d=" << d; break;
    case Kind::SparseBall: os << "sparse_ball(d=" << d << ",s=" << s; break;
    case Kind::UnionOfSubspaces: os << "union_of_subspaces(d=" << d << ",s=" << s << ",S=" << S; break;
  }
  os << ",r=" << radius << ")";
  return os.str();
}

double entropy_bound(const SignalModel& model, double eta, const EntropyConstants& k) {
  model.validate();
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  const double r = model.radius;
  switch (model.kind) {
    case SignalModel::Kind::Ball:
      return k.C_prime * static_cast<double>(model.d) * std::log1p(2.0 * r / eta);
    case SignalModel::Kind::UnionOfSubspaces:
      return k.C_prime * static_cast<double>(model.s) * std::log1p(2.0 * r / eta) + std::log(model.S);
    case SignalModel::Kind::SparseBall: {
      // s ln(d/s) alone decreases once s > d/e; taking the running maximum
      // keeps the bound monotone in s.
      double combinatorial = 0.0;
      const double d = static_cast<double>(model.d);
      for (std::size_t t = 1; t <= model.s; ++t)
        combinatorial = std::max(combinatorial, static_cast<double>(t) * std::log(d / static_cast<double>(t)));
      return k.C * combinatorial * std::log1p(r / eta);
    }
  }
  return 0.0;
}

double covering_scale(const FrequencySampler& sampler, const PeriodicMap& f, const PeriodicMap& g) {
  const double c_lambda = c_lambda_or_throw(sampler);
  const double lf = mean_lipschitz_bound(f), lg = mean_lipschitz_bound(g);
  return 4.0 * c_lambda * (lf + lg + 2.0 * std::min(lf, lg));
}

std::uint64_t required_features_uniform(double eps, const SignalModel& model, const FrequencySampler& sampler,
                                        const PeriodicMap& f, const PeriodicMap& g, const EntropyConstants& k) {
  check_eps(eps);
  const double c = covering_scale(sampler, f, g);
  return feature_count(128.0 / (eps * eps) * entropy_bound(model, eps / c, k));
}

std::uint64_t required_features_semi_quantized(double eps, const SignalModel& model,
                                               const FrequencySampler& sampler, const EntropyConstants& k) {
  check_eps(eps);
  const double c_lambda = c_lambda_or_throw(sampler);
  constexpr double pi = std::numbers::pi;
  const double radius = eps / ((8.0 + 6.0 * pi) * c_lambda);
  return feature_count(32.0 * pi * pi / (eps * eps) * entropy_bound(model, radius, k));
}

std::uint64_t required_features_rff(double eps, const SignalModel& model, const FrequencySampler& sampler,
                                    const EntropyConstants& k) {
  check_eps(eps);
  const auto e = PeriodicMap::complex_exponential();
  return required_features_uniform(eps, model, sampler, e, e, k);
}

double hoeffding_failure_prob(std::uint64_t m, double eps) {
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  return 2.0 * std::exp(-static_cast<double>(m) * eps * eps / 2.0);
}

}  // namespace arpf
