#include "arpf/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

#include "arpf/features.hpp"
#include "arpf/kernels.hpp"
#include "arpf/parallel_kernels.hpp"
#include "arpf/philox.hpp"
#include "arpf/svm.hpp"

namespace arpf {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kDrawStream = 2;

std::uint64_t job_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return mix_seed(mix_seed(mix_seed(seed, a), b), c);
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

void header(std::ostream& os, const ExperimentConfig& cfg, const char* columns) {
  os << "# config_hash=" << cfg.hash() << '\n' << columns << '\n';
}

}  // namespace

std::string experiment_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::KernelScatter: return "kernel-scatter";
    case ExperimentKind::ErrorSweep: return "error-sweep";
    case ExperimentKind::SuccessGrid: return "success-grid";
    case ExperimentKind::SvmCurves: return "svm-curves";
  }
  return "?";
}

ExperimentKind experiment_from_name(const std::string& name) {
  for (auto k : {ExperimentKind::KernelScatter, ExperimentKind::ErrorSweep, ExperimentKind::SuccessGrid,
                 ExperimentKind::SvmCurves})
    if (experiment_name(k) == name) return k;
  throw std::invalid_argument("unknown experiment: " + name);
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::KernelScatter:
      c.sampler = "gaussian:1.5";
      c.d = 5;
      c.m_list = {200};
      c.trials = 1;
      break;
    case ExperimentKind::ErrorSweep:
      c.sampler = "gaussian:0.25";
      c.d = 5;
      c.n_list = {200};
      c.m_list = {100, 200, 400, 800, 1600, 3200};
      c.trials = 20;
      break;
    case ExperimentKind::SuccessGrid:
      c.sampler = "gaussian:0.25";
      c.d = 32;
      c.n_list = {10, 50, 250};
      c.m_list = {100, 141, 200, 283, 400, 566, 800, 1131, 1600, 2263, 3200};
      c.trials = 20;
      break;
    case ExperimentKind::SvmCurves:
      c.sampler = "gaussian:2";
      c.d = 2;
      c.m_list = {50, 100, 200, 400, 800, 1600};
      c.trials = 5;
      c.mixture.n = 1000;
      c.n_train = 800;
      break;
  }
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"kind", experiment_name(kind)},
          {"sampler", sampler},
          {"d", d},
          {"m_list", m_list},
          {"n_list", n_list},
          {"lambda_max", lambda_max},
          {"n_pairs", n_pairs},
          {"trials", trials},
          {"seed", seed},
          {"eps_bar", eps_bar},
          {"data_std", data_std},
          {"R_list", R_list},
          {"n_train", n_train},
          {"mixture",
           {{"classes", mixture.classes},
            {"components", mixture.components},
            {"n", mixture.n},
            {"center_range", mixture.center_range},
            {"component_std", mixture.component_std},
            {"min_separation", mixture.min_separation}}}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig c = defaults(experiment_from_name(j.at("kind").get<std::string>()));
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") continue;
    else if (key == "sampler") c.sampler = v.get<std::string>();
    else if (key == "d") c.d = v.get<std::size_t>();
    else if (key == "m_list") c.m_list = v.get<std::vector<std::size_t>>();
    else if (key == "n_list") c.n_list = v.get<std::vector<std::size_t>>();
    else if (key == "lambda_max") c.lambda_max = v.get<double>();
    else if (key == "n_pairs") c.n_pairs = v.get<std::size_t>();
    else if (key == "trials") c.trials = v.get<int>();
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "eps_bar") c.eps_bar = v.get<double>();
    else if (key == "data_std") c.data_std = v.get<double>();
    else if (key == "R_list") c.R_list = v.get<std::vector<double>>();
    else if (key == "n_train") c.n_train = v.get<std::size_t>();
    else if (key == "mixture") {
      for (const auto& [mk, mv] : v.items()) {
        if (mk == "classes") c.mixture.classes = mv.get<int>();
        else if (mk == "components") c.mixture.components = mv.get<int>();
        else if (mk == "n") c.mixture.n = mv.get<std::size_t>();
        else if (mk == "center_range") c.mixture.center_range = mv.get<double>();
        else if (mk == "component_std") c.mixture.component_std = mv.get<double>();
        else if (mk == "min_separation") c.mixture.min_separation = mv.get<double>();
        else throw std::invalid_argument("unknown mixture key: " + mk);
      }
    } else {
      throw std::invalid_argument("unknown config key: " + key);
    }
  }
  c.validate();
  return c;
}

void ExperimentConfig::validate() const {
  if (d == 0 || m_list.empty() || trials < 1) throw std::invalid_argument("config: counts must be positive");
  for (auto m : m_list)
    if (m == 0) throw std::invalid_argument("config: m must be positive");
  if (kind != ExperimentKind::KernelScatter && kind != ExperimentKind::SvmCurves) {
    if (n_list.empty()) throw std::invalid_argument("config: n_list is empty");
    for (auto n : n_list)
      if (n == 0) throw std::invalid_argument("config: n must be positive");
  }
  if (kind == ExperimentKind::KernelScatter && n_pairs < 2) throw std::invalid_argument("config: need two pairs");
  if (kind == ExperimentKind::SvmCurves && (n_train == 0 || n_train >= mixture.n || R_list.empty()))
    throw std::invalid_argument("config: need 0 < n_train < mixture.n and R values");
  FrequencySampler::from_spec(sampler, d);
}

std::string ExperimentConfig::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return {buf, end};
}

Matrix gaussian_signals(std::size_t n, std::size_t d, double std, std::uint64_t seed) {
  Matrix X(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    PhiloxStream rng(seed, i);
    for (std::size_t k = 0; k < d; ++k) X(i, k) = std * rng.normal();
  }
  return X;
}

std::vector<ScatterRow> run_kernel_scatter(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sampler = FrequencySampler::from_spec(cfg.sampler, cfg.d);
  const std::size_t n = cfg.n_pairs, d = cfg.d;

  Matrix X(n, d), Y(n, d);
  std::vector<double> lambda(n);
  for (std::size_t i = 0; i < n; ++i) {
    PhiloxStream rng(mix_seed(cfg.seed, kDataStream), i);
    std::vector<double> u(d);
    for (std::size_t k = 0; k < d; ++k) X(i, k) = rng.normal();
    for (std::size_t k = 0; k < d; ++k) u[k] = rng.normal();
    const double un = sampler.norm(u);
    lambda[i] = static_cast<double>(i) * cfg.lambda_max / static_cast<double>(n - 1);
    for (std::size_t k = 0; k < d; ++k) Y(i, k) = X(i, k) + lambda[i] * u[k] / un;
  }

  auto draw = std::make_shared<const RandomDraw>(sampler.draw(cfg.m_list.front(), mix_seed(cfg.seed, kDrawStream)));
  const FeatureEmbedding ecos(draw, PeriodicMap::cosine()), eq(draw, PeriodicMap::universal_quantizer());
  const ExpectedKernel kqq(PeriodicMap::universal_quantizer(), PeriodicMap::universal_quantizer(), sampler);

  std::vector<ScatterRow> rows(3 * n);
  const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 16)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto x = X.row(i), y = Y.row(i);
    const double dist = sampler.distance(x, y);
    const double kappa = sampler.profile(dist);
    const FeatureVector zcx = ecos.embed(x), zcy = ecos.embed(y), zqx = eq.embed(x), zqy = eq.embed(y);
    const double qq_expected = kqq.at_distance(dist).real();
    rows[3 * i] = {std::size_t(i), lambda[i], dist, "cos_cos",
                   rescaled_kernel_estimate(zcx, zcy, Table3Combo::CosCos), kappa, kappa};
    rows[3 * i + 1] = {std::size_t(i), lambda[i], dist, "q_cos",
                       rescaled_kernel_estimate(zqx, zcy, Table3Combo::QCos), kappa, kappa};
    rows[3 * i + 2] = {std::size_t(i), lambda[i], dist, "q_q",
                       rescaled_kernel_estimate(zqx, zqy, Table3Combo::QQ), qq_expected, kappa};
  }
  return rows;
}

std::vector<SweepRow> run_error_sweep(const ExperimentConfig& cfg, const Matrix& signals) {
  cfg.validate();
  const auto sampler = FrequencySampler::from_spec(cfg.sampler, cfg.d);
  const Matrix K = par::kernel_matrix(sampler, signals, signals);
  const std::size_t jobs = cfg.m_list.size() * static_cast<std::size_t>(cfg.trials);
  std::vector<SweepRow> rows(jobs);
  const auto count = static_cast<std::int64_t>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t job = 0; job < count; ++job) {
    const std::size_t m = cfg.m_list[job / cfg.trials];
    const int trial = static_cast<int>(job % cfg.trials);
    const RandomDraw draw = sampler.draw(m, job_seed(cfg.seed, kDrawStream, m, trial));
    const WorstCaseErrors e = par::worst_case_errors(par::cos_q_features(draw, signals), K);
    rows[job] = {m, trial, e.q_cos, e.cos_cos, e.proximity};
  }
  return rows;
}

std::vector<SweepRow> run_error_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_error_sweep(cfg, gaussian_signals(cfg.n_list.front(), cfg.d, cfg.data_std,
                                               mix_seed(cfg.seed, kDataStream)));
}

SuccessGrid run_success_grid(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto sampler = FrequencySampler::from_spec(cfg.sampler, cfg.d);
  SuccessGrid grid;
  const std::size_t T = static_cast<std::size_t>(cfg.trials);
  for (std::size_t n : cfg.n_list) {
    const Matrix X = gaussian_signals(n, cfg.d, cfg.data_std, job_seed(cfg.seed, kDataStream, n));
    const Matrix K = par::kernel_matrix(sampler, X, X);
    const std::size_t jobs = cfg.m_list.size() * T;
    std::vector<WorstCaseErrors> errs(jobs);
    const auto count = static_cast<std::int64_t>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t job = 0; job < count; ++job) {
      const std::size_t m = cfg.m_list[job / T];
      const RandomDraw draw = sampler.draw(m, job_seed(cfg.seed, kDrawStream + n, m, job % T));
      errs[job] = par::worst_case_errors(par::cos_q_features(draw, X), K);
    }
    std::optional<std::size_t> m50[3];
    for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi) {
      double ok[3] = {0, 0, 0};
      for (std::size_t t = 0; t < T; ++t) {
        const auto& e = errs[mi * T + t];
        ok[0] += e.q_cos <= cfg.eps_bar;
        ok[1] += e.cos_cos <= cfg.eps_bar;
        ok[2] += e.proximity <= cfg.eps_bar;
      }
      GridCell cell{n, cfg.m_list[mi], ok[0] / T, ok[1] / T, ok[2] / T};
      const double rates[3] = {cell.q_cos, cell.cos_cos, cell.proximity};
      for (int c = 0; c < 3; ++c)
        if (!m50[c] && rates[c] >= 0.5) m50[c] = cell.m;
      grid.cells.push_back(cell);
    }
    const char* names[3] = {"q_cos", "cos_cos", "proximity"};
    for (int c = 0; c < 3; ++c) grid.transitions.push_back({n, names[c], m50[c]});
  }
  return grid;
}

std::vector<SvmCurveRow> run_svm_curves(const ExperimentConfig& cfg) {
  cfg.validate();
  MixtureSpec spec = cfg.mixture;
  spec.d = cfg.d;
  spec.seed = mix_seed(cfg.seed, kDataStream);
  const Dataset all = synth_gaussian_mixture(spec);
  std::vector<std::size_t> tr(cfg.n_train), te(all.n() - cfg.n_train);
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = i;
  for (std::size_t i = 0; i < te.size(); ++i) te[i] = cfg.n_train + i;
  const Dataset train = all.subset(tr), test = all.subset(te);
  const auto sampler = FrequencySampler::from_spec(cfg.sampler, cfg.d);
  const auto& ytest = *test.labels;
  const Table3Combo combos[4] = {Table3Combo::CosCos, Table3Combo::QCos, Table3Combo::CosQ, Table3Combo::QQ};

  std::vector<SvmCurveRow> rows;
  for (double R : cfg.R_list) {
    SolverOptions opts;
    opts.R = R;
    const SvmModel exact = train_exact(train, sampler, opts);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.n(); ++i)
      correct += argmax_label(exact, exact_scores(exact, train, sampler, test.x.row(i))) == ytest[i];
    rows.push_back({"exact_kernel", R, 0, "exact", 0, double(correct) / test.n()});

    const std::size_t T = static_cast<std::size_t>(cfg.trials);
    const std::size_t jobs = cfg.m_list.size() * T;
    std::vector<std::vector<SvmCurveRow>> per_job(jobs);
    const auto count = static_cast<std::int64_t>(jobs);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t job = 0; job < count; ++job) {
      const std::size_t m = cfg.m_list[job / T];
      const int trial = static_cast<int>(job % T);
      auto draw = std::make_shared<const RandomDraw>(sampler.draw(m, job_seed(cfg.seed, kDrawStream, m, trial)));
      const FeatureEmbedding ecos(draw, PeriodicMap::cosine()), eq(draw, PeriodicMap::universal_quantizer());
      const auto ztrain = ecos.embed_batch(train.x.data, train.n());
      const auto zcos = ecos.embed_batch(test.x.data, test.n());
      const auto zq = eq.embed_batch(test.x.data, test.n());
      const SvmModel on_features = train_on_features(ztrain, *train.labels, opts);
      const Predictor regimes[2] = {Predictor(exact, ztrain), Predictor(on_features, ztrain)};
      const char* regime_names[2] = {"exact_kernel", "on_features"};
      for (int r = 0; r < 2; ++r)
        for (auto combo : combos) {
          const bool q_query = combo == Table3Combo::QCos || combo == Table3Combo::QQ;
          std::size_t ok = 0;
          for (std::size_t i = 0; i < test.n(); ++i)
            ok += regimes[r].predict(q_query ? zq[i] : zcos[i], combo) == ytest[i];
          per_job[job].push_back({regime_names[r], R, m, combo_name(combo), trial, double(ok) / test.n()});
        }
    }
    for (auto& block : per_job) rows.insert(rows.end(), block.begin(), block.end());
  }
  return rows;
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<ScatterRow>& rows) {
  header(os, cfg, "pair,lambda,distance,combo,estimate,expected,kappa");
  for (const auto& r : rows)
    os << r.pair << ',' << format_number(r.lambda) << ',' << format_number(r.distance) << ',' << r.combo << ','
       << format_number(r.estimate) << ',' << format_number(r.expected) << ',' << format_number(r.kappa) << '\n';
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  header(os, cfg, "m,trial,worst_case_error,cos_cos_error,proximity_error");
  for (const auto& r : rows)
    os << r.m << ',' << r.trial << ',' << format_number(r.q_cos) << ',' << format_number(r.cos_cos) << ','
       << format_number(r.proximity) << '\n';
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<GridCell>& rows) {
  header(os, cfg, "n,m,success_rate,cos_cos_success_rate,proximity_success_rate");
  for (const auto& r : rows)
    os << r.n << ',' << r.m << ',' << format_number(r.q_cos) << ',' << format_number(r.cos_cos) << ','
       << format_number(r.proximity) << '\n';
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<GridTransition>& rows) {
  header(os, cfg, "n,criterion,m50");
  for (const auto& r : rows) {
    os << r.n << ',' << r.criterion << ',';
    if (r.m50) os << *r.m50;
    os << '\n';
  }
}

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<SvmCurveRow>& rows) {
  header(os, cfg, "regime,R,m,combo,trial,accuracy");
  for (const auto& r : rows)
    os << r.regime << ',' << format_number(r.R) << ',' << r.m << ',' << r.combo << ',' << r.trial << ','
       << format_number(r.accuracy) << '\n';
}

double loglog_slope(const std::vector<SweepRow>& rows) {
  std::map<std::size_t, std::vector<double>> by_m;
  for (const auto& r : rows) by_m[r.m].push_back(r.q_cos);
  if (by_m.size() < 2) throw std::invalid_argument("loglog_slope: need at least two m values");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(by_m.size());
  for (const auto& [m, errs] : by_m) {
    const double x = std::log10(static_cast<double>(m)), y = std::log10(median(errs));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace arpf
