#include "arpf/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "arpf/parallel_kernels.hpp"
#include "arpf/philox.hpp"

namespace arpf {

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct GapReport {
  double bias;
  double gap;
};

// Bias from the free vectors (midpoint of the feasible interval if none),
// then the relative duality gap of (α, b).
GapReport duality_gap(std::span<const double> alpha, std::span<const double> G, std::span<const int> y, double R) {
  const std::size_t n = alpha.size();
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  std::size_t free = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double yg = y[i] * G[i];
    const bool at_upper = alpha[i] >= R, at_lower = alpha[i] <= 0.0;
    if (at_upper) {
      if (y[i] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower) {
      if (y[i] == +1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  double rho = free > 0 ? sum_free / free : 0.5 * (ub + lb);
  if (!std::isfinite(rho)) rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  const double b = -rho;

  double quad = 0.0, sum_alpha = 0.0, hinge = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    quad += alpha[i] * (G[i] + 1.0);
    sum_alpha += alpha[i];
    hinge += std::max(0.0, 1.0 - (G[i] + 1.0 + y[i] * b));
  }
  const double primal = 0.5 * quad + R * hinge;
  const double dual = sum_alpha - 0.5 * quad;
  return {b, (primal - dual) / std::max(1.0, std::abs(primal))};
}

SvmModel train_from_kernel(const Matrix& K, std::span<const int> labels, const SolverOptions& options,
                           TrainingKind kind) {
  std::vector<int> classes(labels.begin(), labels.end());
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw std::invalid_argument("svm: need at least two classes");
  if (!(options.R > 0.0)) throw std::invalid_argument("svm: R must be positive");

  SvmModel model;
  model.training_kind = kind;
  model.R = options.R;
  model.classes.resize(classes.size());
  const auto tasks = static_cast<std::int64_t>(classes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < tasks; ++c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == classes[c] ? 1 : -1;
    const BinarySolution sol = solve_binary(K, y, options);
    ClassModel& cm = model.classes[c];
    cm.label = classes[c];
    cm.bias = sol.bias;
    cm.gap = sol.gap;
    cm.epochs = sol.epochs;
    for (std::size_t i = 0; i < y.size(); ++i)
      if (sol.alpha[i] > 0.0) {
        cm.support.push_back(i);
        cm.alpha_y.push_back(sol.alpha[i] * y[i]);
      }
  }
  return model;
}

Matrix feature_kernel(const std::vector<FeatureVector>& features) {
  if (features.empty()) throw std::invalid_argument("svm: no training features");
  const std::size_t m = features.front().size();
  Matrix Z(features.size(), m);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].kind() != PayloadKind::DenseReal || features[i].size() != m)
      throw std::invalid_argument("train_on_features: expects DenseReal features of equal length");
    std::copy(features[i].real().begin(), features[i].real().end(), Z.row(i).begin());
  }
  Matrix K = par::cross_gram(Z, Z);
  for (double& v : K.data) v *= 2.0;
  return K;
}

}  // namespace

BinarySolution solve_binary(const Matrix& K, std::span<const int> y, const SolverOptions& options) {
  const std::size_t n = y.size();
  if (K.rows != n || K.cols != n) throw std::invalid_argument("solve_binary: kernel shape mismatch");
  const double R = options.R;
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  BinarySolution out;

  auto upper_ok = [&](std::size_t t) { return y[t] == 1 ? alpha[t] < R : alpha[t] > 0.0; };
  auto lower_ok = [&](std::size_t t) { return y[t] == 1 ? alpha[t] > 0.0 : alpha[t] < R; };

  for (int epoch = 0; epoch < options.max_epochs; ++epoch) {
    bool optimal = false;
    for (std::size_t step = 0; step < n && !optimal; ++step) {
      // Second-order working-set selection.
      double gmax = -kInf, gmax2 = -kInf;
      std::ptrdiff_t i = -1, j = -1;
      for (std::size_t t = 0; t < n; ++t)
        if (upper_ok(t) && -y[t] * G[t] >= gmax) {
          gmax = -y[t] * G[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      if (i < 0) {
        optimal = true;
        break;
      }
      const double* Ki = K.data.data() + i * n;
      double best = kInf;
      for (std::size_t t = 0; t < n; ++t) {
        if (!lower_ok(t)) continue;
        const double v = y[t] * G[t];
        gmax2 = std::max(gmax2, v);
        const double grad_diff = gmax + v;
        if (grad_diff > 0.0) {
          double quad = K(i, i) + K(t, t) - 2.0 * Ki[t];
          if (quad <= 0.0) quad = kTau;
          const double obj = -grad_diff * grad_diff / quad;
          if (obj <= best) {
            best = obj;
            j = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
      if (gmax + gmax2 < 1e-10 || j < 0) {
        optimal = true;
        break;
      }

      const double* Kj = K.data.data() + j * n;
      const double yi = y[i], yj = y[j];
      const double ai_old = alpha[i], aj_old = alpha[j];
      double quad = K(i, i) + K(j, j) - 2.0 * Ki[j];
      if (quad <= 0.0) quad = kTau;
      double& ai = alpha[i];
      double& aj = alpha[j];
      if (yi != yj) {
        const double delta = (-G[i] - G[j]) / quad;
        const double diff = ai - aj;
        ai += delta;
        aj += delta;
        if (diff > 0.0) {
          if (aj < 0.0) aj = 0.0, ai = diff;
        } else if (ai < 0.0) {
          ai = 0.0, aj = -diff;
        }
        if (diff > 0.0) {
          if (ai > R) ai = R, aj = R - diff;
        } else if (aj > R) {
          aj = R, ai = R + diff;
        }
      } else {
        const double delta = (G[i] - G[j]) / quad;
        const double sum = ai + aj;
        ai -= delta;
        aj += delta;
        if (sum > R) {
          if (ai > R) ai = R, aj = sum - R;
        } else if (aj < 0.0) {
          aj = 0.0, ai = sum;
        }
        if (sum > R) {
          if (aj > R) aj = R, ai = sum - R;
        } else if (ai < 0.0) {
          ai = 0.0, aj = sum;
        }
      }
      const double di = (ai - ai_old) * yi, dj = (aj - aj_old) * yj;
      for (std::size_t t = 0; t < n; ++t) G[t] += y[t] * (Ki[t] * di + Kj[t] * dj);
    }
    out.epochs = epoch + 1;
    const GapReport report = duality_gap(alpha, G, y, R);
    out.bias = report.bias;
    out.gap = report.gap;
    if (optimal || report.gap <= options.gap_tol) break;
  }
  out.alpha = std::move(alpha);
  return out;
}

std::vector<int> SvmModel::labels() const {
  std::vector<int> out;
  for (const auto& c : classes) out.push_back(c.label);
  return out;
}

double SvmModel::max_gap() const {
  double g = 0.0;
  for (const auto& c : classes) g = std::max(g, c.gap);
  return g;
}

SvmModel train_exact(const Dataset& data, const FrequencySampler& kernel, const SolverOptions& options) {
  if (!data.labels) throw std::invalid_argument("train_exact: dataset has no labels");
  const Matrix K = par::kernel_matrix(kernel, data.x, data.x);
  SvmModel model = train_from_kernel(K, *data.labels, options, TrainingKind::ExactKernel);
  model.kernel = kernel.spec();
  return model;
}

SvmModel train_on_features(const std::vector<FeatureVector>& features, std::span<const int> labels,
                           const SolverOptions& options) {
  if (features.size() != labels.size()) throw std::invalid_argument("train_on_features: label count mismatch");
  return train_from_kernel(feature_kernel(features), labels, options, TrainingKind::LinearOnFeatures);
}

std::vector<double> exact_scores(const SvmModel& model, const Dataset& train, const FrequencySampler& kernel,
                                 std::span<const double> x) {
  if (x.size() != train.d()) throw std::invalid_argument("exact_scores: dimension mismatch");
  std::vector<double> scores;
  for (const auto& c : model.classes) {
    double s = c.bias;
    for (std::size_t k = 0; k < c.support.size(); ++k)
      s += c.alpha_y[k] * kernel.profile(kernel.distance(x, train.x.row(c.support[k])));
    scores.push_back(s);
  }
  return scores;
}

int argmax_label(const SvmModel& model, std::span<const double> scores) {
  if (scores.size() != model.classes.size() || scores.empty())
    throw std::invalid_argument("argmax_label: score count mismatch");
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return model.classes[best].label;
}

Predictor::Predictor(const SvmModel& model, const std::vector<FeatureVector>& cos_database) {
  if (cos_database.empty()) throw std::invalid_argument("Predictor: empty feature database");
  m_ = cos_database.front().size();
  const double s = 1.0 / std::sqrt(static_cast<double>(m_));
  for (const auto& c : model.classes) {
    std::vector<double> wc(m_, 0.0), wq(m_, 0.0);
    for (std::size_t k = 0; k < c.support.size(); ++k) {
      const FeatureVector& z = cos_database.at(c.support[k]);
      if (z.kind() != PayloadKind::DenseReal || z.size() != m_)
        throw std::invalid_argument("Predictor: database rows must be DenseReal of equal length");
      const auto& v = z.real();
      const double ay = c.alpha_y[k];
      for (std::size_t j = 0; j < m_; ++j) {
        wc[j] += ay * v[j];
        wq[j] += ay * (v[j] >= 0.0 ? s : -s);
      }
    }
    labels_.push_back(c.label);
    bias_.push_back(c.bias);
    w_cos_.push_back(FeatureVector::dense_real(std::move(wc)));
    w_q_.push_back(FeatureVector::dense_real(std::move(wq)));
  }
}

std::vector<double> Predictor::scores(const FeatureVector& query, Table3Combo combo) const {
  if (query.size() != m_) throw std::invalid_argument("predict: feature length mismatch");
  if (query.kind() != combo_payloads(combo).first)
    throw std::invalid_argument("predict: query payload does not match " + combo_name(combo));
  const bool quantized_supports = combo == Table3Combo::CosQ || combo == Table3Combo::QQ;
  const auto& w = quantized_supports ? w_q_ : w_cos_;
  const double scale = combo_scale(combo);
  std::vector<double> out(labels_.size());
  for (std::size_t c = 0; c < labels_.size(); ++c) out[c] = scale * inner_product(query, w[c]).real() + bias_[c];
  return out;
}

int Predictor::predict(const FeatureVector& query, Table3Combo combo) const {
  const auto s = scores(query, combo);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c)
    if (s[c] > s[best]) best = c;
  return labels_[best];
}

nlohmann::json model_to_json(const SvmModel& model) {
  nlohmann::json j;
  j["classes"] = model.labels();
  j["training_kind"] = model.training_kind == TrainingKind::ExactKernel ? "exact_kernel" : "linear_on_features";
  j["R"] = model.R;
  j["kernel"] = model.kernel;
  auto& per = j["per_class"] = nlohmann::json::array();
  for (const auto& c : model.classes)
    per.push_back({{"label", c.label},
                   {"support_indices", c.support},
                   {"alpha_y", c.alpha_y},
                   {"bias", c.bias},
                   {"gap", c.gap},
                   {"epochs", c.epochs}});
  if (model.embedding) {
    const auto& e = *model.embedding;
    j["embedding_ref"] = {{"seed", e.seed}, {"m", e.m}, {"sampler", e.sampler}, {"d", e.d}, {"map", e.map}};
  } else {
    j["embedding_ref"] = nullptr;
  }
  return j;
}

SvmModel model_from_json(const nlohmann::json& j) {
  SvmModel model;
  const std::string kind = j.at("training_kind");
  if (kind == "exact_kernel") model.training_kind = TrainingKind::ExactKernel;
  else if (kind == "linear_on_features") model.training_kind = TrainingKind::LinearOnFeatures;
  else throw std::runtime_error("model: unknown training_kind " + kind);
  model.R = j.at("R");
  model.kernel = j.value("kernel", "");
  for (const auto& c : j.at("per_class")) {
    ClassModel cm;
    cm.label = c.at("label");
    cm.support = c.at("support_indices").get<std::vector<std::size_t>>();
    cm.alpha_y = c.at("alpha_y").get<std::vector<double>>();
    cm.bias = c.at("bias");
    cm.gap = c.value("gap", 0.0);
    cm.epochs = c.value("epochs", 0);
    if (cm.support.size() != cm.alpha_y.size()) throw std::runtime_error("model: support/alpha length mismatch");
    model.classes.push_back(std::move(cm));
  }
  if (j.contains("embedding_ref") && !j["embedding_ref"].is_null()) {
    const auto& e = j["embedding_ref"];
    model.embedding = EmbeddingRef{e.at("seed"), e.at("m"), e.at("sampler"), e.value("d", std::size_t{0}),
                                   e.value("map", std::string("cos"))};
  }
  return model;
}

void save_model(const SvmModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << model_to_json(model).dump(2) << '\n';
  if (!os) throw std::runtime_error("write failed: " + path);
}

SvmModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return model_from_json(nlohmann::json::parse(is));
}

std::vector<CvResult> cross_validate(const Dataset& data, std::span<const double> sigmas, std::span<const double> Rs,
                                     int folds, std::uint64_t seed, const SolverOptions& base) {
  if (!data.labels) throw std::invalid_argument("cross_validate: dataset has no labels");
  if (folds < 2 || static_cast<std::size_t>(folds) > data.n()) throw std::invalid_argument("cross_validate: bad fold count");
  const std::size_t n = data.n();

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  PhiloxStream rng(seed, 0);
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_u64() % i]);
  std::vector<int> fold_of(n);
  for (std::size_t r = 0; r < n; ++r) fold_of[perm[r]] = static_cast<int>(r % folds);

  std::vector<CvResult> results;
  for (double sigma : sigmas) {
    const auto kernel = FrequencySampler::gaussian(sigma, data.d());
    const Matrix K = par::kernel_matrix(kernel, data.x, data.x);
    for (double R : Rs) {
      SolverOptions opts = base;
      opts.R = R;
      std::size_t correct = 0;
      for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> train, test;
        for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? test : train).push_back(i);
        Matrix Kt(train.size(), train.size());
        std::vector<int> yl(train.size());
        for (std::size_t a = 0; a < train.size(); ++a) {
          yl[a] = (*data.labels)[train[a]];
          for (std::size_t b = 0; b < train.size(); ++b) Kt(a, b) = K(train[a], train[b]);
        }
        SvmModel model = train_from_kernel(Kt, yl, opts, TrainingKind::ExactKernel);
        for (std::size_t t : test) {
          std::vector<double> scores;
          for (const auto& c : model.classes) {
            double s = c.bias;
            for (std::size_t k = 0; k < c.support.size(); ++k) s += c.alpha_y[k] * K(t, train[c.support[k]]);
            scores.push_back(s);
          }
          correct += argmax_label(model, scores) == (*data.labels)[t];
        }
      }
      results.push_back({sigma, R, static_cast<double>(correct) / static_cast<double>(n)});
    }
  }
  std::stable_sort(results.begin(), results.end(),
                   [](const CvResult& a, const CvResult& b) { return a.accuracy > b.accuracy; });
  return results;
}

}  // namespace arpf
