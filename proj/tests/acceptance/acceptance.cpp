// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "arpf/bounds.hpp"
#include "arpf/experiments.hpp"
#include "arpf/features.hpp"
#include "arpf/kernels.hpp"
#include "arpf/netdemo.hpp"
#include "arpf/periodic_map.hpp"
#include "arpf/philox.hpp"
#include "arpf/wire.hpp"
#include "demo_fixture.hpp"

using namespace arpf;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Stats {
  double mean = 0.0, se = 0.0;
};

Stats stats(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  const double mean = s / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (v.size() - 1) / v.size())};
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Pairs (x, y) in dimension d with ‖x - y‖ running linearly over [0, r_max].
std::vector<std::pair<std::vector<double>, std::vector<double>>> pairs(std::size_t count, std::size_t d,
                                                                       double r_max, std::uint64_t seed) {
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out;
  for (std::size_t p = 0; p < count; ++p) {
    PhiloxStream rng(seed, p);
    std::vector<double> x(d), u(d), y(d);
    double un = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      x[k] = rng.normal();
      u[k] = rng.normal();
      un += u[k] * u[k];
    }
    const double r = r_max * double(p) / double(count - 1);
    for (std::size_t k = 0; k < d; ++k) y[k] = x[k] + r * u[k] / std::sqrt(un);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

const auto kQ = PeriodicMap::universal_quantizer();
const auto kCos = PeriodicMap::cosine();
const auto kExp = PeriodicMap::complex_exponential();

Outcome fourier_oracle() {
  double worst = 0.0;
  for (int k = -25; k <= 25; ++k) worst = std::max(worst, std::abs(numerical_fourier_coefficient(kQ, k) - kQ.coefficient(k)));
  const double qc = std::abs(pf_inner_product(kQ, kCos) - cplx(2 / pi));
  const double qq = std::abs(pf_inner_product(kQ, kQ).real() - 1.0);
  return {worst <= 1e-9 && qc <= 1e-9 && qq <= 1e-6,
          fmt("max |F_k - closed form| = %.2e, |<q,cos> - 2/pi| = %.2e, | ||q||^2 - 1 | = %.2e", worst, qc, qq)};
}

Outcome mean_lipschitz() {
  const double lq = estimate_mean_lipschitz_numeric(kQ);
  const double le = estimate_mean_lipschitz_numeric(kExp);
  const double lc = estimate_mean_lipschitz_numeric(kCos);
  const bool ok = std::abs(lq / (4 / pi) - 1) <= 0.02 && std::abs(le - 1) <= 0.02 && lc >= 2 / pi && lc <= 1;
  return {ok, fmt("q %.4f (4/pi = %.4f), exp %.4f, cos %.4f", lq, 4 / pi, le, lc)};
}

Outcome expected_kernel_cross_oracle() {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const ExpectedKernel kqq(kQ, kQ, s);
  double series_vs_gh = 0.0, series_vs_exact = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = 3.0 * i / 19.0;
    const double series = kqq.at_distance(r).real();
    series_vs_gh = std::max(series_vs_gh, std::abs(series - distorted_qq_gauss_hermite(s, r)));
    series_vs_exact = std::max(series_vs_exact, std::abs(series - distorted_qq_closed_form(s, r)));
  }
  const double stated = 1 - std::sqrt(2.0) * std::pow(pi, -1.5) * 0.5;
  const double series05 = kqq.at_distance(0.5).real(), gh05 = distorted_qq_gauss_hermite(s, 0.5);
  const bool ok = series_vs_gh <= 1e-6 && std::abs(series05 - stated) <= 1e-6 && std::abs(gh05 - stated) <= 1e-6;
  return {ok, fmt("max |series - GH201| = %.2e, max |series - piecewise exact| = %.2e; at 0.5: series %.10f, "
                  "GH %.10f, 1 - sqrt2 pi^-1.5 0.5 = %.10f, 1 - 2 sqrt2 pi^-1.5 0.5 = %.10f",
                  series_vs_gh, series_vs_exact, series05, gh05, stated,
                  1 - 2 * std::sqrt(2.0) * std::pow(pi, -1.5) * 0.5)};
}

Outcome unbiased_and_hoeffding() {
  const std::size_t d = 5;
  const auto s = FrequencySampler::gaussian(1.5, d);
  const auto ps = pairs(20, d, 4.0, 101);
  const Table3Combo combos[4] = {Table3Combo::CosCos, Table3Combo::QCos, Table3Combo::CosQ, Table3Combo::QQ};
  auto map_of = [](bool quantized) { return quantized ? kQ : kCos; };
  auto sides = [](Table3Combo c) {
    return std::pair{c == Table3Combo::QCos || c == Table3Combo::QQ, c == Table3Combo::CosQ || c == Table3Combo::QQ};
  };

  // Unbiasedness at m = 256 over 2000 draws.
  int misses = 0;
  double worst_z = 0.0;
  const std::size_t draws = 2000;
  std::vector<std::vector<std::vector<double>>> est(ps.size(), std::vector<std::vector<double>>(4));
  for (std::size_t t = 0; t < draws; ++t) {
    auto draw = std::make_shared<const RandomDraw>(s.draw(256, 1000 + t));
    const FeatureEmbedding ec(draw, kCos), eq(draw, kQ);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      const FeatureVector zc[2] = {ec.embed(ps[p].first), ec.embed(ps[p].second)};
      const FeatureVector zq[2] = {eq.embed(ps[p].first), eq.embed(ps[p].second)};
      for (int c = 0; c < 4; ++c) {
        const auto [lq, rq] = sides(combos[c]);
        est[p][c].push_back(rescaled_kernel_estimate(lq ? zq[0] : zc[0], rq ? zq[1] : zc[1], combos[c]));
      }
    }
  }
  for (std::size_t p = 0; p < ps.size(); ++p)
    for (int c = 0; c < 4; ++c) {
      const auto [lq, rq] = sides(combos[c]);
      const double expected =
          combo_scale(combos[c]) * ExpectedKernel(map_of(lq), map_of(rq), s)(ps[p].first, ps[p].second).real();
      const auto st = stats(est[p][c]);
      const double z = std::abs(st.mean - expected) / st.se;
      worst_z = std::max(worst_z, z);
      misses += z > 4.0;
    }

  // Hoeffding: |<z_f, z_g> - κ_{f,g}| > 0.1 at m = 1000 for the raw products.
  const double eps = 0.1;
  std::size_t trials = 0, exceed[4] = {0, 0, 0, 0};
  for (std::size_t t = 0; t < 100; ++t) {
    auto draw = std::make_shared<const RandomDraw>(s.draw(1000, 50000 + t));
    const FeatureEmbedding ec(draw, kCos), eq(draw, kQ);
    for (const auto& [x, y] : ps) {
      ++trials;
      const FeatureVector zc[2] = {ec.embed(x), ec.embed(y)}, zq[2] = {eq.embed(x), eq.embed(y)};
      for (int c = 0; c < 4; ++c) {
        const auto [lq, rq] = sides(combos[c]);
        const double raw = inner_product(lq ? zq[0] : zc[0], rq ? zq[1] : zc[1]).real();
        const double expected = ExpectedKernel(map_of(lq), map_of(rq), s)(x, y).real();
        exceed[c] += std::abs(raw - expected) > eps;
      }
    }
  }
  const double p0 = hoeffding_failure_prob(1000, eps);
  const double limit = p0 + 3 * std::sqrt(p0 * (1 - p0) / double(trials));
  double worst_rate = 0.0;
  for (auto e : exceed) worst_rate = std::max(worst_rate, double(e) / double(trials));
  return {misses == 0 && worst_rate <= limit,
          fmt("%d of 80 (pair, combo) means outside 4 se (max z %.2f); worst exceedance %.4f vs limit %.4f "
              "(%zu trials)",
              misses, worst_z, worst_rate, limit, trials)};
}

Outcome semi_quantized_recovery() {
  const std::size_t d = 4;
  const auto s = FrequencySampler::gaussian(1.0, d);
  const auto ps = pairs(10, d, 3.0, 202);
  int misses = 0;
  double worst_z = 0.0;
  std::vector<std::vector<double>> est(ps.size());
  for (std::size_t t = 0; t < 2000; ++t) {
    auto draw = std::make_shared<const RandomDraw>(s.draw(256, 7000 + t));
    const FeatureEmbedding ec(draw, kCos), eq(draw, kQ);
    for (std::size_t p = 0; p < ps.size(); ++p)
      est[p].push_back(pi / 2 * inner_product(eq.embed(ps[p].first), ec.embed(ps[p].second)).real());
  }
  for (std::size_t p = 0; p < ps.size(); ++p) {
    const double r = s.distance(ps[p].first, ps[p].second);
    const auto st = stats(est[p]);
    const double z = std::abs(st.mean - std::exp(-r * r / 2)) / st.se;
    worst_z = std::max(worst_z, z);
    misses += z > 4.0;
  }
  return {misses == 0, fmt("%d of 10 pairs outside 4 se (max z %.2f)", misses, worst_z)};
}

Outcome distortion_is_real() {
  const auto s = FrequencySampler::gaussian(1.0, 2);
  const ExpectedKernel kqq(kQ, kQ, s);
  double gap = 0.0, at = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const double r = 0.01 * i, g = std::abs(kqq.at_distance(r).real() - std::exp(-r * r / 2));
    if (g > gap) gap = g, at = r;
  }
  return {gap > 0.05, fmt("max |k_qq - k| = %.4f at r = %.2f", gap, at)};
}

Outcome error_scaling(double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = ExperimentConfig::defaults(ExperimentKind::ErrorSweep);
  const auto rows = run_error_sweep(cfg);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double slope = loglog_slope(rows);
  return {slope >= -0.65 && slope <= -0.35,
          fmt("slope %.3f (n = %zu, d = %zu, %d trials)", slope, cfg.n_list[0], cfg.d, cfg.trials)};
}

Outcome success_grid() {
  const auto cfg = ExperimentConfig::defaults(ExperimentKind::SuccessGrid);
  const auto grid = run_success_grid(cfg);
  std::map<std::string, std::map<std::size_t, std::size_t>> m50;
  bool all_found = true;
  for (const auto& t : grid.transitions) {
    if (!t.m50) all_found = false;
    else m50[t.criterion][t.n] = *t.m50;
  }
  if (!all_found) return {false, "a 50% transition was not reached within the m grid"};
  bool monotone = true, sublinear = true, ordered = true;
  std::string table;
  for (const auto& [crit, by_n] : m50) {
    std::size_t prev = 0;
    for (const auto& [n, m] : by_n) {
      monotone &= m >= prev;
      prev = m;
    }
    sublinear &= double(by_n.at(250)) / 250 < double(by_n.at(10)) / 10;
    table += fmt(" %s:%zu/%zu/%zu", crit.c_str(), by_n.at(10), by_n.at(50), by_n.at(250));
  }
  for (std::size_t n : cfg.n_list) ordered &= m50["q_cos"][n] >= m50["cos_cos"][n];
  return {monotone && sublinear && ordered,
          fmt("m50 at n = 10/50/250:%s; nondecreasing %s, sublinear %s, q.cos >= cos.cos %s", table.c_str(),
              monotone ? "yes" : "no", sublinear ? "yes" : "no", ordered ? "yes" : "no")};
}

Outcome distance_maps() {
  const auto s = FrequencySampler::gaussian(1.0, 3);
  const DistanceMap qc(kQ, kCos, s), cc(kCos, kCos, s), qq(kQ, kQ, s);
  const double at0 = std::abs(qc(0.0) - (1.5 - 4 / pi));
  double cc_err = 0.0, inv_err = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double r = 0.01 * i;
    cc_err = std::max(cc_err, std::abs(cc(r) - (1 - std::exp(-r * r / 2))));
    if (i == 0) continue;
    for (const DistanceMap* dm : {&qc, &cc, &qq}) inv_err = std::max(inv_err, std::abs(dm->invert((*dm)(r)) - r));
  }
  const std::size_t d = 3;
  const auto ps = pairs(10, d, 3.0, 303);
  std::vector<std::vector<double>> d2(ps.size());
  for (std::size_t t = 0; t < 2000; ++t) {
    auto draw = std::make_shared<const RandomDraw>(s.draw(128, 9000 + t));
    const FeatureEmbedding ec(draw, kCos), eq(draw, kQ);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      const auto a = eq.embed(ps[p].first).to_real();
      const auto b = ec.embed(ps[p].second).real();
      double acc = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) acc += (a[j] - b[j]) * (a[j] - b[j]);
      d2[p].push_back(acc);
    }
  }
  int misses = 0;
  double worst_z = 0.0;
  for (std::size_t p = 0; p < ps.size(); ++p) {
    const auto st = stats(d2[p]);
    const double z = std::abs(st.mean - qc(s.distance(ps[p].first, ps[p].second))) / st.se;
    worst_z = std::max(worst_z, z);
    misses += z > 4.0;
  }
  return {at0 <= 1e-9 && cc_err <= 1e-8 && inv_err <= 1e-8 && misses == 0,
          fmt("|g_qc(0) - (3/2 - 4/pi)| = %.1e, max cos.cos error %.1e, max inverse round trip %.1e, "
              "%d of 10 pairs outside 4 se (max z %.2f)",
              at0, cc_err, inv_err, misses, worst_z)};
}

Outcome bound_calculators() {
  PhiloxStream rng(77, 0);
  int equal = 0, monotone_fail = 0, checks = 0;
  for (int t = 0; t < 100; ++t) {
    const double eps = 0.01 + 0.5 * rng.uniform_open();
    const double sigma = 0.2 + 3 * rng.uniform_open();
    const std::size_t d = 2 + rng.next_u32() % 50;
    const std::size_t sp = 1 + rng.next_u32() % (d - 1);
    const double S = 1.0 + rng.next_u32() % 1000;
    const auto sampler = FrequencySampler::gaussian(sigma, d);
    const SignalModel models[3] = {SignalModel::ball(d), SignalModel::sparse_ball(d, sp),
                                   SignalModel::union_of_subspaces(d, sp, S)};
    const auto& model = models[t % 3];
    equal += required_features_semi_quantized(eps, model, sampler) ==
             required_features_uniform(2 * eps / pi, model, sampler, kQ, kCos);

    auto m_of = [&](double e, const SignalModel& mo) {
      return required_features_uniform(e, mo, FrequencySampler::gaussian(sigma, mo.d), kQ, kCos);
    };
    const auto m = m_of(eps, model);
    auto check = [&](bool ok) {
      ++checks;
      monotone_fail += !ok;
    };
    check(m >= 1);
    check(m_of(eps * 1.3, model) <= m);
    auto bigger = model;
    bigger.d = d + 1;
    check(m_of(eps, bigger) >= m);
    if (model.kind != SignalModel::Kind::Ball) {
      auto more = model;
      more.s = sp + 1 <= d ? sp + 1 : sp;
      check(m_of(eps, more) >= m);
    }
    if (model.kind == SignalModel::Kind::UnionOfSubspaces) {
      auto more = model;
      more.S = 2 * S;
      check(m_of(eps, more) >= m);
    }
    check(required_features_semi_quantized(eps * 1.3, model, sampler) <=
          required_features_semi_quantized(eps, model, sampler));
    check(hoeffding_failure_prob(200 + t, eps) <= hoeffding_failure_prob(100 + t, eps));
  }
  return {equal == 100 && monotone_fail == 0,
          fmt("%d/100 specialized == generic at 2 eps/pi; %d of %d monotonicity checks failed", equal, monotone_fail,
              checks)};
}

Outcome svm_pipeline(double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = ExperimentConfig::defaults(ExperimentKind::SvmCurves);
  const auto rows = run_svm_curves(cfg);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = true;
  std::string detail;
  for (double R : cfg.R_list) {
    double exact = -1.0;
    std::map<std::pair<std::size_t, std::string>, std::vector<double>> acc;
    for (const auto& r : rows) {
      if (r.regime != "exact_kernel" || r.R != R) continue;
      if (r.combo == "exact") exact = r.accuracy;
      else acc[{r.m, r.combo}].push_back(r.accuracy);
    }
    const double cc1600 = median(acc[{1600, "cos_cos"}]), qc1600 = median(acc[{1600, "q_cos"}]);
    const double qq100 = median(acc[{100, "q_q"}]), cc100 = median(acc[{100, "cos_cos"}]);
    const bool here = exact >= 0.90 && std::abs(cc1600 - qc1600) <= 0.05 && qq100 <= cc100;
    ok &= here;
    detail += fmt("%sR = %g: exact %.3f, m = 1600 cos.cos %.3f q.cos %.3f, m = 100 q.q %.3f cos.cos %.3f",
                  detail.empty() ? "" : "; ", R, exact, cc1600, qc1600, qq100, cc100);
  }
  return {ok, detail + fmt(" (n = %zu/%zu, %d draws)", cfg.n_train, cfg.mixture.n - cfg.n_train, cfg.trials)};
}

Outcome protocol() {
  const std::size_t m = 1024;
  auto fx = demo::make_fixture(m, 21);
  Server server(fx.state);
  server.start();
  Client client("127.0.0.1", server.port());
  client.hello(wire::Mode::Classify);
  int mismatches = 0;
  std::uint64_t payload = 0;
  PhiloxStream rng(31, 0);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(fx.train.d());
    for (double& v : x) v = 4.0 * (2.0 * rng.uniform_open() - 1.0);
    const auto z = fx.q.embed(x);
    const auto remote = client.classify(z.bits());
    payload = client.last_payload_bytes();
    mismatches += remote.label != fx.state->predictor.predict(z, Table3Combo::QCos) ||
                  remote.scores != fx.state->predictor.scores(z, Table3Combo::QCos);
  }
  server.stop();

  int frame_failures = 0;
  for (int t = 0; t < 1000; ++t) {
    wire::Frame f;
    f.version = static_cast<std::uint16_t>(rng.next_u32());
    f.type = static_cast<wire::MessageType>(rng.next_u32() % 5);
    f.payload.resize(rng.next_u32() % 512);
    for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng.next_u32());
    frame_failures += !(wire::decode(wire::encode(f)) == f);
  }
  const std::size_t expected_payload = 4 + (m + 7) / 8;
  const double ratio = double(8 * m) / double((m + 7) / 8);
  return {mismatches == 0 && frame_failures == 0 && payload == expected_payload && ratio == 64.0,
          fmt("%d/100 remote labels differ; %d/1000 frames fail to round trip; query payload %llu B "
              "(expected %zu); f64 feature bytes / packed bytes = %.0f",
              mismatches, frame_failures, static_cast<unsigned long long>(payload), expected_payload, ratio)};
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  double sweep_s = 0.0, svm_s = 0.0;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Fourier-coefficient oracle", fourier_oracle},
      {"Mean-Lipschitz estimator", mean_lipschitz},
      {"Expected-kernel cross-oracle", expected_kernel_cross_oracle},
      {"Unbiasedness and Hoeffding", unbiased_and_hoeffding},
      {"Semi-quantized exact recovery", semi_quantized_recovery},
      {"Distortion is real", distortion_is_real},
      {"Error scaling", [&] { return error_scaling(sweep_s); }},
      {"Success grid", success_grid},
      {"Distance maps", distance_maps},
      {"Bound calculators", bound_calculators},
      {"SVM pipeline", [&] { return svm_pipeline(svm_s); }},
      {"Protocol end-to-end", protocol},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("AC%zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d of %zu criteria passed in %.1f s\n", int(criteria.size()) - failed, criteria.size(), total);
  return failed == 0 ? 0 : 1;
}
