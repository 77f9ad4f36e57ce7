#include <algorithm>
#include <cmath>
#include <string>

#include "gemm.hpp"
#include "remaster/errors.hpp"
#include "remaster/ops.hpp"

namespace remaster {

Tensor matmul_batched(const Tensor& a, const Tensor& b, bool transpose_a, bool transpose_b) {
  if (a.rank() != 3 || b.rank() != 3) throw DimensionError("rank", "matmul_batched expects rank-3 operands");
  if (a.dim(0) != b.dim(0)) throw DimensionError("batch", "matmul_batched batch mismatch");
  const std::int64_t batch = a.dim(0);
  const std::int64_t m = transpose_a ? a.dim(2) : a.dim(1);
  const std::int64_t k = transpose_a ? a.dim(1) : a.dim(2);
  const std::int64_t kb = transpose_b ? b.dim(2) : b.dim(1);
  const std::int64_t n = transpose_b ? b.dim(1) : b.dim(2);
  if (k != kb) {
    throw DimensionError("inner", "matmul_batched inner dimensions " + std::to_string(k) + " vs " + std::to_string(kb));
  }
  const std::int64_t lda = a.dim(2), ldb = b.dim(2);
  const std::int64_t a_stride = a.dim(1) * a.dim(2), b_stride = b.dim(1) * b.dim(2);
  std::vector<float> out(static_cast<std::size_t>(batch * m * n), 0.0f);
  for (std::int64_t i = 0; i < batch; ++i) {
    kernels::gemm(transpose_a, transpose_b, m, n, k, a.data().data() + i * a_stride, lda,
                  b.data().data() + i * b_stride, ldb, out.data() + i * m * n, n);
  }
  return Tensor::make_result(
      {batch, m, n}, std::move(out), {a, b},
      [a, b, transpose_a, transpose_b, batch, m, n, k, lda, ldb, a_stride, b_stride](detail::Node& self) {
        auto& an = a.node();
        auto& bn = b.node();
        const float* g = self.grad.data();
        for (std::int64_t i = 0; i < batch; ++i) {
          const float* gi = g + i * m * n;
          const float* ai = an.data.data() + i * a_stride;
          const float* bi = bn.data.data() + i * b_stride;
          if (an.requires_grad) {
            float* ga = an.ensure_grad().data() + i * a_stride;
            // C = op(A) op(B): dop(A) = G op(B)^T.
            if (!transpose_a) {
              kernels::gemm(false, !transpose_b, m, k, n, gi, n, bi, ldb, ga, lda);
            } else {
              // dA (k x m) = op(B) G^T
              kernels::gemm(transpose_b, true, k, m, n, bi, ldb, gi, n, ga, lda);
            }
          }
          if (bn.requires_grad) {
            float* gb = bn.ensure_grad().data() + i * b_stride;
            if (!transpose_b) {
              // dB (k x n) = op(A)^T G
              kernels::gemm(!transpose_a, false, k, n, m, ai, lda, gi, n, gb, ldb);
            } else {
              // dB (n x k) = G^T op(A)
              kernels::gemm(true, transpose_a, n, k, m, gi, n, ai, lda, gb, ldb);
            }
          }
        }
      });
}

Tensor softmax_axis(const Tensor& x, int axis) {
  if (axis < 0 || axis >= x.rank()) throw DimensionError("rank", "softmax axis out of range");
  std::int64_t outer = 1, inner = 1;
  for (int i = 0; i < axis; ++i) outer *= x.dim(i);
  for (int i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
  const std::int64_t len = x.dim(axis);
  std::vector<float> out(static_cast<std::size_t>(x.numel()));
  const float* xv = x.data().data();
  for (std::int64_t o = 0; o < outer; ++o) {
    const float* src = xv + o * len * inner;
    float* dst = out.data() + o * len * inner;
    std::vector<float> mx(static_cast<std::size_t>(inner), -INFINITY);
    std::vector<double> denom(static_cast<std::size_t>(inner), 0.0);
    for (std::int64_t l = 0; l < len; ++l)
      for (std::int64_t i = 0; i < inner; ++i) mx[i] = std::max(mx[i], src[l * inner + i]);
    for (std::int64_t l = 0; l < len; ++l) {
      for (std::int64_t i = 0; i < inner; ++i) {
        const float e = std::exp(src[l * inner + i] - mx[i]);
        dst[l * inner + i] = e;
        denom[i] += e;
      }
    }
    for (std::int64_t l = 0; l < len; ++l)
      for (std::int64_t i = 0; i < inner; ++i) dst[l * inner + i] = static_cast<float>(dst[l * inner + i] / denom[i]);
  }
  return Tensor::make_result(x.shape(), std::move(out), {x}, [x, outer, inner, len](detail::Node& self) {
    auto& xn = x.node();
    if (!xn.requires_grad) return;
    float* gx = xn.ensure_grad().data();
    const float* y = self.data.data();
    const float* gy = self.grad.data();
    std::vector<double> dot(static_cast<std::size_t>(inner));
    for (std::int64_t o = 0; o < outer; ++o) {
      const std::int64_t base = o * len * inner;
      std::fill(dot.begin(), dot.end(), 0.0);
      for (std::int64_t l = 0; l < len; ++l)
        for (std::int64_t i = 0; i < inner; ++i) dot[i] += static_cast<double>(gy[base + l * inner + i]) * y[base + l * inner + i];
      for (std::int64_t l = 0; l < len; ++l) {
        for (std::int64_t i = 0; i < inner; ++i) {
          const std::int64_t idx = base + l * inner + i;
          gx[idx] += static_cast<float>(y[idx] * (gy[idx] - dot[i]));
        }
      }
    }
  });
}

}  // namespace remaster
