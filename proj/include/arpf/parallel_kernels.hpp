#pragma once

// Dense batch kernels used by the experiments. Every routine exists twice:
// arpf::par (OpenMP, register-blocked) and arpf::serial (naive loops, kept as
// the reference the parallel versions are tested and benchmarked against).
// The parallel results do not depend on the thread count.

#include "arpf/matrix.hpp"
#include "arpf/sampling.hpp"

namespace arpf {

/// Worst-case deviations over all ordered pairs (i, j).
struct WorstCaseErrors {
  double q_cos = 0.0;      // max |π/2 ⟨z_q(x_i), z_cos(x_j)⟩ - κ(x_i, x_j)|
  double cos_cos = 0.0;    // max |2 ⟨z_cos(x_i), z_cos(x_j)⟩ - κ(x_i, x_j)|
  double proximity = 0.0;  // max |π/2 ⟨z_q, z_cos⟩ - 2 ⟨z_cos, z_cos⟩|
};

/// Embeddings of every row of X under cos and q, both scaled by 1/√m.
struct CosQFeatures {
  Matrix cos;
  Matrix q;
};

namespace par {
/// X (n × d) → XΩ + ξ (n × m).
Matrix project(const RandomDraw& draw, const Matrix& X);
CosQFeatures cos_q_features(const RandomDraw& draw, const Matrix& X);
/// A (n × m), B (p × m) → A Bᵀ (n × p).
Matrix cross_gram(const Matrix& A, const Matrix& B);
/// κ₀(x_i - y_j) for the sampler's analytic kernel.
Matrix kernel_matrix(const FrequencySampler& sampler, const Matrix& X, const Matrix& Y);
WorstCaseErrors worst_case_errors(const CosQFeatures& z, const Matrix& K);
}  // namespace par

namespace serial {
/// X (n × d) → XΩ + ξ (n × m).
Matrix project(const RandomDraw& draw, const Matrix& X);
CosQFeatures cos_q_features(const RandomDraw& draw, const Matrix& X);
/// A (n × m), B (p × m) → A Bᵀ (n × p).
Matrix cross_gram(const Matrix& A, const Matrix& B);
/// κ₀(x_i - y_j) for the sampler's analytic kernel.
Matrix kernel_matrix(const FrequencySampler& sampler, const Matrix& X, const Matrix& Y);
WorstCaseErrors worst_case_errors(const CosQFeatures& z, const Matrix& K);
}  // namespace serial

}  // namespace arpf
