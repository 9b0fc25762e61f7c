#include "arpf/parallel_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace arpf {

namespace {

// Work is split only over output rows, so the OpenMP versions give the same
// answer for any thread count.

Matrix project_impl(const RandomDraw& draw, const Matrix& X, bool parallel) {
  if (X.cols != draw.d) throw std::invalid_argument("project: dimension mismatch");
  const std::size_t m = draw.m, d = draw.d;
  Matrix P(X.rows, m);
  const auto n = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i) {
    double* out = P.data.data() + i * m;
    std::copy(draw.xi.begin(), draw.xi.end(), out);
    for (std::size_t k = 0; k < d; ++k) {
      const double x = X(i, k);
      const double* w = draw.omega.data() + k * m;
#pragma omp simd
      for (std::size_t j = 0; j < m; ++j) out[j] += x * w[j];
    }
  }
  return P;
}

CosQFeatures cos_q_impl(const RandomDraw& draw, const Matrix& X, bool parallel) {
  Matrix P = project_impl(draw, X, parallel);
  const double s = 1.0 / std::sqrt(static_cast<double>(draw.m));
  CosQFeatures z{Matrix(P.rows, P.cols), Matrix(P.rows, P.cols)};
  const auto total = static_cast<std::int64_t>(P.data.size());
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t e = 0; e < total; ++e) {
    const double c = std::cos(P.data[e]);
    z.cos.data[e] = s * c;
    z.q.data[e] = c >= 0.0 ? s : -s;
  }
  return z;
}

// 4 × 2 register block of dot products over a shared length m.
inline void dot_block(const double* const* a, const double* const* b, std::size_t m, double out[4][2]) {
  double c00 = 0, c01 = 0, c10 = 0, c11 = 0, c20 = 0, c21 = 0, c30 = 0, c31 = 0;
  const double *a0 = a[0], *a1 = a[1], *a2 = a[2], *a3 = a[3], *b0 = b[0], *b1 = b[1];
#pragma omp simd reduction(+ : c00, c01, c10, c11, c20, c21, c30, c31)
  for (std::size_t k = 0; k < m; ++k) {
    c00 += a0[k] * b0[k];
    c01 += a0[k] * b1[k];
    c10 += a1[k] * b0[k];
    c11 += a1[k] * b1[k];
    c20 += a2[k] * b0[k];
    c21 += a2[k] * b1[k];
    c30 += a3[k] * b0[k];
    c31 += a3[k] * b1[k];
  }
  out[0][0] = c00, out[0][1] = c01, out[1][0] = c10, out[1][1] = c11;
  out[2][0] = c20, out[2][1] = c21, out[3][0] = c30, out[3][1] = c31;
}

Matrix cross_gram_impl(const Matrix& A, const Matrix& B, bool parallel) {
  if (A.cols != B.cols) throw std::invalid_argument("cross_gram: inner dimension mismatch");
  const std::size_t m = A.cols, n = A.rows, p = B.rows;
  Matrix C(n, p);
  const auto blocks = static_cast<std::int64_t>((n + 3) / 4);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::int64_t ib = 0; ib < blocks; ++ib) {
    const std::size_t i0 = static_cast<std::size_t>(ib) * 4;
    const std::size_t rows = std::min<std::size_t>(4, n - i0);
    // Short blocks repeat their last row; duplicates are not stored.
    const double* a[4];
    for (std::size_t r = 0; r < 4; ++r) a[r] = A.data.data() + (i0 + std::min(r, rows - 1)) * m;
    double out[4][2];
    for (std::size_t j0 = 0; j0 < p; j0 += 2) {
      const std::size_t cols = std::min<std::size_t>(2, p - j0);
      const double* b[2] = {B.data.data() + j0 * m, B.data.data() + (j0 + cols - 1) * m};
      dot_block(a, b, m, out);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) C(i0 + r, j0 + c) = out[r][c];
    }
  }
  return C;
}

Matrix kernel_matrix_impl(const FrequencySampler& sampler, const Matrix& X, const Matrix& Y, bool parallel) {
  if (X.cols != sampler.dimension() || Y.cols != sampler.dimension())
    throw std::invalid_argument("kernel_matrix: dimension mismatch");
  Matrix K(X.rows, Y.rows);
  const auto n = static_cast<std::int64_t>(X.rows);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < Y.rows; ++j) K(i, j) = sampler.profile(sampler.distance(X.row(i), Y.row(j)));
  return K;
}

WorstCaseErrors worst_case_impl(const CosQFeatures& z, const Matrix& K, bool parallel) {
  const std::size_t n = z.cos.rows;
  if (z.q.rows != n || K.rows != n || K.cols != n) throw std::invalid_argument("worst_case_errors: shape mismatch");
  const Matrix gqc = cross_gram_impl(z.q, z.cos, parallel);
  const Matrix gcc = cross_gram_impl(z.cos, z.cos, parallel);
  const double half_pi = std::numbers::pi / 2.0;
  double e_qc = 0.0, e_cc = 0.0, e_px = 0.0;
  const auto total = static_cast<std::int64_t>(n * n);
#pragma omp parallel for schedule(static) reduction(max : e_qc, e_cc, e_px) if (parallel)
  for (std::int64_t e = 0; e < total; ++e) {
    const double qc = half_pi * gqc.data[e];
    const double cc = 2.0 * gcc.data[e];
    e_qc = std::max(e_qc, std::abs(qc - K.data[e]));
    e_cc = std::max(e_cc, std::abs(cc - K.data[e]));
    e_px = std::max(e_px, std::abs(qc - cc));
  }
  return {e_qc, e_cc, e_px};
}

}  // namespace

namespace par {
Matrix project(const RandomDraw& draw, const Matrix& X) { return project_impl(draw, X, true); }
CosQFeatures cos_q_features(const RandomDraw& draw, const Matrix& X) { return cos_q_impl(draw, X, true); }
Matrix cross_gram(const Matrix& A, const Matrix& B) { return cross_gram_impl(A, B, true); }
Matrix kernel_matrix(const FrequencySampler& s, const Matrix& X, const Matrix& Y) {
  return kernel_matrix_impl(s, X, Y, true);
}
WorstCaseErrors worst_case_errors(const CosQFeatures& z, const Matrix& K) { return worst_case_impl(z, K, true); }
}  // namespace par

namespace serial {

Matrix project(const RandomDraw& draw, const Matrix& X) {
  if (X.cols != draw.d) throw std::invalid_argument("project: dimension mismatch");
  Matrix P(X.rows, draw.m);
  for (std::size_t i = 0; i < X.rows; ++i)
    for (std::size_t j = 0; j < draw.m; ++j) {
      double t = draw.xi[j];
      for (std::size_t k = 0; k < draw.d; ++k) t += X(i, k) * draw.at(k, j);
      P(i, j) = t;
    }
  return P;
}

CosQFeatures cos_q_features(const RandomDraw& draw, const Matrix& X) {
  const Matrix P = project(draw, X);
  const double s = 1.0 / std::sqrt(static_cast<double>(draw.m));
  CosQFeatures z{Matrix(P.rows, P.cols), Matrix(P.rows, P.cols)};
  for (std::size_t e = 0; e < P.data.size(); ++e) {
    const double c = std::cos(P.data[e]);
    z.cos.data[e] = s * c;
    z.q.data[e] = c >= 0.0 ? s : -s;
  }
  return z;
}

Matrix cross_gram(const Matrix& A, const Matrix& B) {
  if (A.cols != B.cols) throw std::invalid_argument("cross_gram: inner dimension mismatch");
  Matrix C(A.rows, B.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < B.rows; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < A.cols; ++k) acc += A(i, k) * B(j, k);
      C(i, j) = acc;
    }
  return C;
}

Matrix kernel_matrix(const FrequencySampler& s, const Matrix& X, const Matrix& Y) {
  return kernel_matrix_impl(s, X, Y, false);
}

WorstCaseErrors worst_case_errors(const CosQFeatures& z, const Matrix& K) {
  const std::size_t n = z.cos.rows;
  if (z.q.rows != n || K.rows != n || K.cols != n) throw std::invalid_argument("worst_case_errors: shape mismatch");
  const Matrix gqc = cross_gram(z.q, z.cos);
  const Matrix gcc = cross_gram(z.cos, z.cos);
  WorstCaseErrors w;
  for (std::size_t e = 0; e < n * n; ++e) {
    const double qc = std::numbers::pi / 2.0 * gqc.data[e];
    const double cc = 2.0 * gcc.data[e];
    w.q_cos = std::max(w.q_cos, std::abs(qc - K.data[e]));
    w.cos_cos = std::max(w.cos_cos, std::abs(cc - K.data[e]));
    w.proximity = std::max(w.proximity, std::abs(qc - cc));
  }
  return w;
}

}  // namespace serial

}  // namespace arpf
