#include "gemm.hpp"

#include <algorithm>
#include <vector>

namespace remaster::kernels {

namespace {

constexpr std::int64_t kColBlock = 512;

// C += A * B where A element (i, kk) is a[i * a_row + kk * a_col].
void gemm_rowwise(std::int64_t m, std::int64_t n, std::int64_t k, const float* a, std::int64_t a_row,
                  std::int64_t a_col, const float* b, std::int64_t ldb, float* c, std::int64_t ldc) {
  const std::int64_t row_groups = (m + 3) / 4;
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < row_groups; ++g) {
    const std::int64_t i0 = g * 4;
    const std::int64_t rows = std::min<std::int64_t>(4, m - i0);
    for (std::int64_t j0 = 0; j0 < n; j0 += kColBlock) {
      const std::int64_t jn = std::min(n, j0 + kColBlock) - j0;
      if (rows == 4) {
        float* c0 = c + (i0 + 0) * ldc + j0;
        float* c1 = c + (i0 + 1) * ldc + j0;
        float* c2 = c + (i0 + 2) * ldc + j0;
        float* c3 = c + (i0 + 3) * ldc + j0;
        for (std::int64_t kk = 0; kk < k; ++kk) {
          const float a0 = a[(i0 + 0) * a_row + kk * a_col];
          const float a1 = a[(i0 + 1) * a_row + kk * a_col];
          const float a2 = a[(i0 + 2) * a_row + kk * a_col];
          const float a3 = a[(i0 + 3) * a_row + kk * a_col];
          const float* bk = b + kk * ldb + j0;
#pragma omp simd
          for (std::int64_t j = 0; j < jn; ++j) {
            const float bv = bk[j];
            c0[j] += a0 * bv;
            c1[j] += a1 * bv;
            c2[j] += a2 * bv;
            c3[j] += a3 * bv;
          }
        }
      } else {
        for (std::int64_t r = 0; r < rows; ++r) {
          float* ci = c + (i0 + r) * ldc + j0;
          for (std::int64_t kk = 0; kk < k; ++kk) {
            const float av = a[(i0 + r) * a_row + kk * a_col];
            if (av == 0.0f) continue;
            const float* bk = b + kk * ldb + j0;
#pragma omp simd
            for (std::int64_t j = 0; j < jn; ++j) ci[j] += av * bk[j];
          }
        }
      }
    }
  }
}

// C += A * B^T, both operands read along contiguous rows.
void gemm_dot(std::int64_t m, std::int64_t n, std::int64_t k, const float* a, std::int64_t lda, const float* b,
              std::int64_t ldb, float* c, std::int64_t ldc) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < m; ++i) {
    const float* ai = a + i * lda;
    for (std::int64_t j = 0; j < n; ++j) {
      const float* bj = b + j * ldb;
      float s = 0.0f;
#pragma omp simd reduction(+ : s)
      for (std::int64_t kk = 0; kk < k; ++kk) s += ai[kk] * bj[kk];
      c[i * ldc + j] += s;
    }
  }
}

}  // namespace

void gemm(bool transpose_a, bool transpose_b, std::int64_t m, std::int64_t n, std::int64_t k, const float* a,
          std::int64_t lda, const float* b, std::int64_t ldb, float* c, std::int64_t ldc) {
  if (m == 0 || n == 0 || k == 0) return;
  if (!transpose_b) {
    if (transpose_a) {
      gemm_rowwise(m, n, k, a, 1, lda, b, ldb, c, ldc);
    } else {
      gemm_rowwise(m, n, k, a, lda, 1, b, ldb, c, ldc);
    }
    return;
  }
  if (!transpose_a) {
    gemm_dot(m, n, k, a, lda, b, ldb, c, ldc);
    return;
  }
  // Rare case: materialise A^T so both operands are row-contiguous.
  std::vector<float> at(static_cast<std::size_t>(m * k));
  for (std::int64_t kk = 0; kk < k; ++kk)
    for (std::int64_t i = 0; i < m; ++i) at[static_cast<std::size_t>(i * k + kk)] = a[kk * lda + i];
  gemm_dot(m, n, k, at.data(), k, b, ldb, c, ldc);
}

}  // namespace remaster::kernels
