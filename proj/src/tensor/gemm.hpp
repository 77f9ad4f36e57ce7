#pragma once

#include <cstdint>

namespace remaster::kernels {

// Row-major C(M x N) += op(A) * op(B) with leading dimensions.
// op(A) is M x K: A is M x K (lda) or, transposed, K x M.
// op(B) is K x N: B is K x N (ldb) or, transposed, N x K.
// Each C row is owned by one worker; accumulation order is fixed.
void gemm(bool transpose_a, bool transpose_b, std::int64_t m, std::int64_t n, std::int64_t k,
          const float* a, std::int64_t lda, const float* b, std::int64_t ldb, float* c, std::int64_t ldc);

}  // namespace remaster::kernels
