#pragma once

// Seeded synthetic pipelines that emit CSV. Every CSV starts with a
// "# config_hash=<16 hex digits>" comment followed by a header row; identical
// configurations give identical bytes.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arpf/dataset.hpp"

namespace arpf {

enum class ExperimentKind { KernelScatter, ErrorSweep, SuccessGrid, SvmCurves };

std::string experiment_name(ExperimentKind k);  // "kernel-scatter", ...
ExperimentKind experiment_from_name(const std::string& name);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::KernelScatter;
  std::string sampler = "gaussian:1.5";
  std::size_t d = 5;
  std::vector<std::size_t> m_list = {200};
  std::vector<std::size_t> n_list = {200};
  double lambda_max = 5.0;      // kernel scatter: largest pair distance
  std::size_t n_pairs = 2000;   // kernel scatter: number of pairs
  int trials = 20;
  std::uint64_t seed = 0;
  double eps_bar = 0.15;        // success threshold
  double data_std = 10.0;       // signals ~ N(0, data_std² I) for sweeps and grids
  std::vector<double> R_list = {5.0, 0.25};
  MixtureSpec mixture;          // svm curves; n = train + test
  std::size_t n_train = 800;

  /// Desk-scale defaults for each experiment.
  static ExperimentConfig defaults(ExperimentKind kind);

  nlohmann::json to_json() const;
  /// Missing keys keep the defaults of the given kind; unknown keys throw.
  static ExperimentConfig from_json(const nlohmann::json& j);

  /// Validates counts; throws std::invalid_argument.
  void validate() const;
  /// FNV-1a of the canonical JSON form, as 16 lowercase hex digits.
  std::string hash() const;
};

/// Shortest round-trip decimal form.
std::string format_number(double v);

struct ScatterRow {
  std::size_t pair;
  double lambda;
  double distance;  // in the sampler's norm, recomputed from the pair
  std::string combo;
  double estimate;  // rescaled inner product
  double expected;  // rescaled expected kernel (κ for cos·cos and q·cos, κ_{q,q} for q·q)
  double kappa;     // analytic kernel
};

struct SweepRow {
  std::size_t m;
  int trial;
  double q_cos;
  double cos_cos;
  double proximity;
};

struct GridCell {
  std::size_t n;
  std::size_t m;
  double q_cos;      // success rates over the trials
  double cos_cos;
  double proximity;
};

struct GridTransition {
  std::size_t n;
  std::string criterion;         // "q_cos", "cos_cos", "proximity"
  std::optional<std::size_t> m50;  // smallest m with rate >= 0.5
};

struct SvmCurveRow {
  std::string regime;  // "exact_kernel" or "on_features"
  double R;
  std::size_t m;       // 0 for the exact reference
  std::string combo;   // "exact" for the reference
  int trial;
  double accuracy;
};

std::vector<ScatterRow> run_kernel_scatter(const ExperimentConfig& cfg);
std::vector<SweepRow> run_error_sweep(const ExperimentConfig& cfg);
/// Uses one fixed dataset of n_list[0] signals in dimension d.
std::vector<SweepRow> run_error_sweep(const ExperimentConfig& cfg, const Matrix& signals);

struct SuccessGrid {
  std::vector<GridCell> cells;
  std::vector<GridTransition> transitions;
};
SuccessGrid run_success_grid(const ExperimentConfig& cfg);

std::vector<SvmCurveRow> run_svm_curves(const ExperimentConfig& cfg);

void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<ScatterRow>& rows);
void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<SweepRow>& rows);
void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<GridCell>& rows);
void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<GridTransition>& rows);
void write_csv(std::ostream& os, const ExperimentConfig& cfg, const std::vector<SvmCurveRow>& rows);

/// Least-squares slope of log10(median error) against log10(m).
double loglog_slope(const std::vector<SweepRow>& rows);

/// Signals ~ N(0, std² I) from a seeded stream.
Matrix gaussian_signals(std::size_t n, std::size_t d, double std, std::uint64_t seed);

}  // namespace arpf
