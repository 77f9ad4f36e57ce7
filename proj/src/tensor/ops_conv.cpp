#include <algorithm>
#include <string>

#include "gemm.hpp"
#include "remaster/errors.hpp"
#include "remaster/ops.hpp"

namespace remaster {

void ConvSpec::validate() const {
  if (in_channels < 1 || out_channels < 1) throw DimensionError("channels", "conv channels must be positive");
  for (int a = 0; a < 3; ++a) {
    if (kernel[a] < 1 || kernel[a] % 2 == 0) {
      throw DimensionError(axis5_name(a + 2), "conv kernel sizes must be odd and positive");
    }
    if (stride[a] < 1) throw DimensionError(axis5_name(a + 2), "conv stride must be positive");
  }
  if (stride[0] != 1) throw DimensionError("time", "temporal stride must be 1");
}

namespace {

struct ConvGeometry {
  std::int64_t batch, cin, t, h, w;
  std::int64_t cout, to, ho, wo;
  std::int64_t kt, kh, kw, st, sh, sw, pt, ph, pw;
  bool replicate;

  std::int64_t k() const { return cin * kt * kh * kw; }
  std::int64_t plane_out() const { return ho * wo; }
  bool pointwise() const { return kt == 1 && kh == 1 && kw == 1 && sh == 1 && sw == 1; }
};

// Resolves an input coordinate under the padding rule; -1 means zero padding.
inline std::int64_t resolve(std::int64_t i, std::int64_t n, bool replicate) {
  if (i >= 0 && i < n) return i;
  if (!replicate) return -1;
  return std::clamp<std::int64_t>(i, 0, n - 1);
}

// Writes the patches of output frame `to` into columns [col_off, col_off + P)
// of a K x ld matrix.
void im2col(const ConvGeometry& g, const float* in, std::int64_t b, std::int64_t to, float* col, std::int64_t ld,
            std::int64_t col_off) {
  for (std::int64_t ci = 0; ci < g.cin; ++ci) {
    for (std::int64_t dt = 0; dt < g.kt; ++dt) {
      const std::int64_t ti = resolve(to * g.st + dt - g.pt, g.t, g.replicate);
      const float* frame = ti < 0 ? nullptr : in + ((b * g.cin + ci) * g.t + ti) * g.h * g.w;
      for (std::int64_t dh = 0; dh < g.kh; ++dh) {
        for (std::int64_t dw = 0; dw < g.kw; ++dw) {
          float* row = col + (((ci * g.kt + dt) * g.kh + dh) * g.kw + dw) * ld + col_off;
          if (!frame) {
            std::fill(row, row + g.plane_out(), 0.0f);
            continue;
          }
          for (std::int64_t oh = 0; oh < g.ho; ++oh) {
            const std::int64_t hi = resolve(oh * g.sh + dh - g.ph, g.h, g.replicate);
            float* dst = row + oh * g.wo;
            if (hi < 0) {
              std::fill(dst, dst + g.wo, 0.0f);
              continue;
            }
            const float* src = frame + hi * g.w;
            for (std::int64_t ow = 0; ow < g.wo; ++ow) {
              const std::int64_t wi = resolve(ow * g.sw + dw - g.pw, g.w, g.replicate);
              dst[ow] = wi < 0 ? 0.0f : src[wi];
            }
          }
        }
      }
    }
  }
}

void col2im_add(const ConvGeometry& g, const float* col, std::int64_t ld, std::int64_t col_off, std::int64_t b,
                std::int64_t to, float* in_grad) {
  for (std::int64_t ci = 0; ci < g.cin; ++ci) {
    for (std::int64_t dt = 0; dt < g.kt; ++dt) {
      const std::int64_t ti = resolve(to * g.st + dt - g.pt, g.t, g.replicate);
      if (ti < 0) continue;
      float* frame = in_grad + ((b * g.cin + ci) * g.t + ti) * g.h * g.w;
      for (std::int64_t dh = 0; dh < g.kh; ++dh) {
        for (std::int64_t dw = 0; dw < g.kw; ++dw) {
          const float* row = col + (((ci * g.kt + dt) * g.kh + dh) * g.kw + dw) * ld + col_off;
          for (std::int64_t oh = 0; oh < g.ho; ++oh) {
            const std::int64_t hi = resolve(oh * g.sh + dh - g.ph, g.h, g.replicate);
            if (hi < 0) continue;
            float* dst = frame + hi * g.w;
            const float* src = row + oh * g.wo;
            for (std::int64_t ow = 0; ow < g.wo; ++ow) {
              const std::int64_t wi = resolve(ow * g.sw + dw - g.pw, g.w, g.replicate);
              if (wi >= 0) dst[wi] += src[ow];
            }
          }
        }
      }
    }
  }
}

// Output frames unrolled together, bounding the patch matrix to ~32 MB.
std::int64_t frames_per_chunk(const ConvGeometry& g) {
  constexpr std::int64_t kBudget = std::int64_t{8} << 20;
  const std::int64_t per_frame = g.k() * g.plane_out();
  return std::clamp<std::int64_t>(kBudget / std::max<std::int64_t>(per_frame, 1), 1, g.to);
}

}  // namespace

Tensor conv3d(const Tensor& input, const Tensor& weight, const Tensor& bias, const ConvSpec& spec) {
  spec.validate();
  if (input.rank() != 5) throw DimensionError("rank", "conv3d input must be rank 5, got " + shape_to_string(input.shape()));
  if (input.dim(kChannel) != spec.in_channels) {
    throw DimensionError("channels", "conv3d expects " + std::to_string(spec.in_channels) + " input channels, got " +
                                         std::to_string(input.dim(kChannel)));
  }
  const Shape wshape{spec.out_channels, spec.in_channels, spec.kernel[0], spec.kernel[1], spec.kernel[2]};
  if (weight.shape() != wshape) {
    throw DimensionError("channels", "conv3d weight shape " + shape_to_string(weight.shape()) + " expected " +
                                         shape_to_string(wshape));
  }
  if (bias.defined() && bias.shape() != Shape{spec.out_channels}) {
    throw DimensionError("channels", "conv3d bias shape " + shape_to_string(bias.shape()));
  }
  for (int a = kTime; a <= kWidth; ++a) {
    if (input.dim(a) < 1) throw DimensionError(axis5_name(a), "conv3d input has empty " + std::string(axis5_name(a)) + " axis");
  }

  ConvGeometry g{};
  g.batch = input.dim(kBatch);
  g.cin = spec.in_channels;
  g.t = input.dim(kTime);
  g.h = input.dim(kHeight);
  g.w = input.dim(kWidth);
  g.cout = spec.out_channels;
  g.kt = spec.kernel[0];
  g.kh = spec.kernel[1];
  g.kw = spec.kernel[2];
  g.st = spec.stride[0];
  g.sh = spec.stride[1];
  g.sw = spec.stride[2];
  g.pt = (g.kt - 1) / 2;
  g.ph = (g.kh - 1) / 2;
  g.pw = (g.kw - 1) / 2;
  g.to = ConvSpec::output_extent(g.t, g.st);
  g.ho = ConvSpec::output_extent(g.h, g.sh);
  g.wo = ConvSpec::output_extent(g.w, g.sw);
  g.replicate = spec.padding == Padding::kReplicate;

  const std::int64_t p = g.plane_out();
  const std::int64_t out_frame_stride = g.to * p;
  std::vector<float> out(static_cast<std::size_t>(g.batch * g.cout * out_frame_stride), 0.0f);
  if (bias.defined()) {
    const auto bv = bias.data();
    for (std::int64_t b = 0; b < g.batch; ++b)
      for (std::int64_t c = 0; c < g.cout; ++c)
        std::fill_n(out.begin() + (b * g.cout + c) * out_frame_stride, out_frame_stride, bv[static_cast<std::size_t>(c)]);
  }

  const float* in = input.data().data();
  const float* wt = weight.data().data();
  const std::int64_t k = g.k();
  const std::int64_t chunk = frames_per_chunk(g);
  std::vector<float> col(g.pointwise() ? 0 : static_cast<std::size_t>(k * p * chunk));
  for (std::int64_t b = 0; b < g.batch; ++b) {
    float* out_b = out.data() + b * g.cout * out_frame_stride;
    if (g.pointwise()) {
      kernels::gemm(false, false, g.cout, out_frame_stride, k, wt, k, in + b * g.cin * g.t * p, g.t * p, out_b,
                    out_frame_stride);
      continue;
    }
    for (std::int64_t t0 = 0; t0 < g.to; t0 += chunk) {
      const std::int64_t nt = std::min(chunk, g.to - t0);
      const std::int64_t ld = nt * p;
      for (std::int64_t i = 0; i < nt; ++i) im2col(g, in, b, t0 + i, col.data(), ld, i * p);
      kernels::gemm(false, false, g.cout, ld, k, wt, k, col.data(), ld, out_b + t0 * p, out_frame_stride);
    }
  }

  std::vector<Tensor> parents{input, weight};
  if (bias.defined()) parents.push_back(bias);
  return Tensor::make_result(
      {g.batch, g.cout, g.to, g.ho, g.wo}, std::move(out), parents,
      [g, input, weight, bias](detail::Node& self) {
        const float* gout = self.grad.data();
        const std::int64_t p = g.plane_out();
        const std::int64_t ofs = g.to * p;
        const std::int64_t k = g.k();
        auto& in_node = input.node();
        auto& w_node = weight.node();
        const bool want_in = in_node.requires_grad;
        const bool want_w = w_node.requires_grad;
        float* gin = want_in ? in_node.ensure_grad().data() : nullptr;
        float* gw = want_w ? w_node.ensure_grad().data() : nullptr;
        if (bias.defined() && bias.node().requires_grad) {
          float* gb = bias.node().ensure_grad().data();
          for (std::int64_t c = 0; c < g.cout; ++c) {
            double s = 0.0;
            for (std::int64_t b = 0; b < g.batch; ++b) {
              const float* src = gout + (b * g.cout + c) * ofs;
              for (std::int64_t i = 0; i < ofs; ++i) s += src[i];
            }
            gb[c] += static_cast<float>(s);
          }
        }
        if (!want_in && !want_w) return;
        const float* in = in_node.data.data();
        const float* wt = w_node.data.data();
        const std::int64_t chunk = frames_per_chunk(g);
        std::vector<float> col(g.pointwise() ? 0 : static_cast<std::size_t>(k * p * chunk));
        std::vector<float> dcol(g.pointwise() || !want_in ? 0 : static_cast<std::size_t>(k * p * chunk));
        for (std::int64_t b = 0; b < g.batch; ++b) {
          const float* go_b = gout + b * g.cout * ofs;
          if (g.pointwise()) {
            const std::int64_t in_off = b * g.cin * g.t * p;
            if (want_w) kernels::gemm(false, true, g.cout, k, ofs, go_b, ofs, in + in_off, ofs, gw, k);
            if (want_in) kernels::gemm(true, false, k, ofs, g.cout, wt, k, go_b, ofs, gin + in_off, ofs);
            continue;
          }
          for (std::int64_t t0 = 0; t0 < g.to; t0 += chunk) {
            const std::int64_t nt = std::min(chunk, g.to - t0);
            const std::int64_t ld = nt * p;
            const float* go = go_b + t0 * p;
            if (want_w) {
              for (std::int64_t i = 0; i < nt; ++i) im2col(g, in, b, t0 + i, col.data(), ld, i * p);
              kernels::gemm(false, true, g.cout, k, ld, go, ofs, col.data(), ld, gw, k);
            }
            if (want_in) {
              std::fill(dcol.begin(), dcol.begin() + k * ld, 0.0f);
              kernels::gemm(true, false, k, ld, g.cout, wt, k, go, ofs, dcol.data(), ld);
              for (std::int64_t i = 0; i < nt; ++i) col2im_add(g, dcol.data(), ld, i * p, b, t0 + i, gin);
            }
          }
        }
      });
}

}  // namespace remaster
