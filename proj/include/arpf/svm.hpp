#pragma once

// One-vs-rest soft-margin SVMs trained by SMO on a precomputed kernel matrix,
// and a predictor that evaluates trained models with any of the four
// query/support feature pairings.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "arpf/dataset.hpp"
#include "arpf/features.hpp"
#include "arpf/matrix.hpp"
#include "arpf/sampling.hpp"

namespace arpf {

struct SolverOptions {
  double R = 1.0;             // box constraint 0 <= α_i <= R
  double gap_tol = 1e-3;      // relative duality gap (P - D) / max(1, |P|)
  int max_epochs = 10000;     // one epoch = n SMO steps
};

struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double gap = 0.0;  // achieved relative duality gap
  int epochs = 0;
};

/// Dual soft-margin SVM for labels y_i ∈ {-1, +1} on kernel matrix K.
BinarySolution solve_binary(const Matrix& K, std::span<const int> y, const SolverOptions& options);

struct ClassModel {
  int label = 0;
  std::vector<std::size_t> support;  // training indices with α_i > 0
  std::vector<double> alpha_y;       // α_i y_i, aligned with support
  double bias = 0.0;
  double gap = 0.0;
  int epochs = 0;
};

enum class TrainingKind { ExactKernel, LinearOnFeatures };

/// Public parameters of a feature embedding; enough to regenerate the draw.
struct EmbeddingRef {
  std::uint64_t seed = 0;
  std::size_t m = 0;
  std::string sampler;  // FrequencySampler::spec()
  std::size_t d = 0;
  std::string map = "cos";

  bool operator==(const EmbeddingRef&) const = default;
};

struct SvmModel {
  std::vector<ClassModel> classes;
  TrainingKind training_kind = TrainingKind::ExactKernel;
  double R = 1.0;
  std::string kernel;  // sampler spec of the exact kernel, if any
  std::optional<EmbeddingRef> embedding;

  std::vector<int> labels() const;
  double max_gap() const;
};

/// Kernel SVM with the sampler's analytic kernel. Requires labels with at
/// least two classes; throws std::invalid_argument otherwise.
SvmModel train_exact(const Dataset& data, const FrequencySampler& kernel, const SolverOptions& options = {});

/// Linear SVM on dense real features, i.e. kernel 2⟨z(x_i), z(x_j)⟩.
SvmModel train_on_features(const std::vector<FeatureVector>& features, std::span<const int> labels,
                           const SolverOptions& options = {});

/// Per-class scores Σ_i α_i y_i κ(x, x_i) + b with the exact kernel.
std::vector<double> exact_scores(const SvmModel& model, const Dataset& train, const FrequencySampler& kernel,
                                 std::span<const double> x);

/// Highest score wins; ties go to the lowest class index.
int argmax_label(const SvmModel& model, std::span<const double> scores);

/// Binary decision with ties at zero resolving to the positive class.
inline int decision_sign(double score) { return score >= 0.0 ? 1 : -1; }

/// Inference with feature combos. Support features come from a database of
/// cos features indexed like the training set; each class's supports are
/// folded into weight vectors w = Σ α_i y_i z(x_i), once for cos supports and
/// once for their quantized signs.
class Predictor {
 public:
  Predictor(const SvmModel& model, const std::vector<FeatureVector>& cos_database);

  std::size_t m() const noexcept { return m_; }
  std::vector<double> scores(const FeatureVector& query, Table3Combo combo) const;
  int predict(const FeatureVector& query, Table3Combo combo) const;

 private:
  std::vector<int> labels_;
  std::vector<double> bias_;
  std::vector<FeatureVector> w_cos_;  // DenseReal
  std::vector<FeatureVector> w_q_;    // DenseReal holding Σ α y z_q
  std::size_t m_ = 0;
};

nlohmann::json model_to_json(const SvmModel& model);
SvmModel model_from_json(const nlohmann::json& j);
void save_model(const SvmModel& model, const std::string& path);
SvmModel load_model(const std::string& path);

struct CvResult {
  double sigma = 0.0;
  double R = 0.0;
  double accuracy = 0.0;
};

/// k-fold grid search over (σ, R) for the exact Gaussian-kernel SVM. Fold
/// assignment is a seeded permutation. Returns every grid point, best first.
std::vector<CvResult> cross_validate(const Dataset& data, std::span<const double> sigmas,
                                     std::span<const double> Rs, int folds, std::uint64_t seed,
                                     const SolverOptions& base = {});

}  // namespace arpf
