#include <cmath>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/ops.hpp"

namespace remaster {

namespace {

struct AxisTaps {
  std::vector<std::int64_t> lo, hi;
  std::vector<float> w_hi;  // weight of `hi`; `lo` gets 1 - w_hi
};

// Half-pixel sampling: src = (dst + 0.5) * in / out - 0.5, clamped at the low edge.
AxisTaps axis_taps(std::int64_t in, std::int64_t out) {
  AxisTaps taps;
  taps.lo.resize(static_cast<std::size_t>(out));
  taps.hi.resize(static_cast<std::size_t>(out));
  taps.w_hi.resize(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::int64_t o = 0; o < out; ++o) {
    double src = (static_cast<double>(o) + 0.5) * ratio - 0.5;
    if (src < 0.0) src = 0.0;
    auto lo = static_cast<std::int64_t>(std::floor(src));
    if (lo > in - 1) lo = in - 1;
    const std::int64_t hi = lo + 1 < in ? lo + 1 : in - 1;
    taps.lo[o] = lo;
    taps.hi[o] = hi;
    taps.w_hi[o] = hi == lo ? 0.0f : static_cast<float>(src - static_cast<double>(lo));
  }
  return taps;
}

}  // namespace

Tensor trilinear_resize(const Tensor& input, std::array<std::int64_t, 3> target) {
  if (input.rank() != 5) throw DimensionError("rank", "trilinear_resize expects rank 5");
  for (int a = 0; a < 3; ++a) {
    if (target[a] < 1) throw DimensionError(axis5_name(a + 2), "trilinear_resize target must be >= 1");
    if (input.dim(a + 2) < 1) throw DimensionError(axis5_name(a + 2), "trilinear_resize of empty input");
  }
  const std::int64_t bc = input.dim(kBatch) * input.dim(kChannel);
  const std::int64_t t = input.dim(kTime), h = input.dim(kHeight), w = input.dim(kWidth);
  const auto [ot, oh, ow] = target;
  if (ot == t && oh == h && ow == w) return reshape(input, input.shape());

  const auto tt = axis_taps(t, ot);
  const auto th = axis_taps(h, oh);
  const auto tw = axis_taps(w, ow);

  std::vector<float> out(static_cast<std::size_t>(bc * ot * oh * ow));
  const float* x = input.data().data();
  for (std::int64_t n = 0; n < bc; ++n) {
    const float* src = x + n * t * h * w;
    float* dst = out.data() + n * ot * oh * ow;
    for (std::int64_t i = 0; i < ot; ++i) {
      const float wt1 = tt.w_hi[i], wt0 = 1.0f - wt1;
      const float* f0 = src + tt.lo[i] * h * w;
      const float* f1 = src + tt.hi[i] * h * w;
      for (std::int64_t j = 0; j < oh; ++j) {
        const float wh1 = th.w_hi[j], wh0 = 1.0f - wh1;
        const std::int64_t r0 = th.lo[j] * w, r1 = th.hi[j] * w;
        for (std::int64_t k = 0; k < ow; ++k) {
          const float ww1 = tw.w_hi[k], ww0 = 1.0f - ww1;
          const std::int64_t c0 = tw.lo[k], c1 = tw.hi[k];
          const float v0 = wh0 * (ww0 * f0[r0 + c0] + ww1 * f0[r0 + c1]) + wh1 * (ww0 * f0[r1 + c0] + ww1 * f0[r1 + c1]);
          const float v1 = wh0 * (ww0 * f1[r0 + c0] + ww1 * f1[r0 + c1]) + wh1 * (ww0 * f1[r1 + c0] + ww1 * f1[r1 + c1]);
          dst[(i * oh + j) * ow + k] = wt0 * v0 + wt1 * v1;
        }
      }
    }
  }
  Shape shape{input.dim(kBatch), input.dim(kChannel), ot, oh, ow};
  return Tensor::make_result(std::move(shape), std::move(out), {input},
                             [input, tt, th, tw, bc, t, h, w, ot, oh, ow](detail::Node& self) {
                               auto& xn = input.node();
                               if (!xn.requires_grad) return;
                               float* gx = xn.ensure_grad().data();
                               const float* gy = self.grad.data();
                               for (std::int64_t n = 0; n < bc; ++n) {
                                 float* dst = gx + n * t * h * w;
                                 const float* src = gy + n * ot * oh * ow;
                                 for (std::int64_t i = 0; i < ot; ++i) {
                                   const float wt1 = tt.w_hi[i], wt0 = 1.0f - wt1;
                                   float* f0 = dst + tt.lo[i] * h * w;
                                   float* f1 = dst + tt.hi[i] * h * w;
                                   for (std::int64_t j = 0; j < oh; ++j) {
                                     const float wh1 = th.w_hi[j], wh0 = 1.0f - wh1;
                                     const std::int64_t r0 = th.lo[j] * w, r1 = th.hi[j] * w;
                                     for (std::int64_t k = 0; k < ow; ++k) {
                                       const float ww1 = tw.w_hi[k], ww0 = 1.0f - ww1;
                                       const std::int64_t c0 = tw.lo[k], c1 = tw.hi[k];
                                       const float g = src[(i * oh + j) * ow + k];
                                       for (int s = 0; s < 2; ++s) {
                                         float* f = s == 0 ? f0 : f1;
                                         const float gt = g * (s == 0 ? wt0 : wt1);
                                         f[r0 + c0] += gt * wh0 * ww0;
                                         f[r0 + c1] += gt * wh0 * ww1;
                                         f[r1 + c0] += gt * wh1 * ww0;
                                         f[r1 + c1] += gt * wh1 * ww1;
                                       }
                                     }
                                   }
                                 }
                               }
                             });
}

}  // namespace remaster
