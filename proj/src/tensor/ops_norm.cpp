#include <cmath>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/ops.hpp"

namespace remaster {

Tensor batch_norm(const Tensor& input, const Tensor& scale, const Tensor& shift, BatchNormStats& stats, bool training,
                  BatchNormConfig cfg) {
  if (input.rank() != 5) throw DimensionError("rank", "batch_norm input must be rank 5");
  const std::int64_t batch = input.dim(kBatch);
  const std::int64_t channels = input.dim(kChannel);
  const std::int64_t plane = input.dim(kTime) * input.dim(kHeight) * input.dim(kWidth);
  const std::int64_t count = batch * plane;
  const Shape cshape{channels};
  if (scale.shape() != cshape || shift.shape() != cshape || stats.running_mean.shape() != cshape ||
      stats.running_var.shape() != cshape) {
    throw DimensionError("channels", "batch_norm parameters must have shape " + shape_to_string(cshape));
  }
  if (count == 0) throw DimensionError("channels", "batch_norm over a zero-element channel");

  const float* x = input.data().data();
  const float* gamma = scale.data().data();
  const float* beta = shift.data().data();
  std::vector<float> out(static_cast<std::size_t>(input.numel()));
  std::vector<float> mean_used(static_cast<std::size_t>(channels));
  std::vector<float> inv_std(static_cast<std::size_t>(channels));

  auto rm = stats.running_mean.mutable_data();
  auto rv = stats.running_var.mutable_data();
  for (std::int64_t c = 0; c < channels; ++c) {
    double mu, var;
    if (training) {
      double s = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) {
        const float* src = x + (b * channels + c) * plane;
        for (std::int64_t i = 0; i < plane; ++i) s += src[i];
      }
      mu = s / static_cast<double>(count);
      double ss = 0.0;
      for (std::int64_t b = 0; b < batch; ++b) {
        const float* src = x + (b * channels + c) * plane;
        for (std::int64_t i = 0; i < plane; ++i) {
          const double d = src[i] - mu;
          ss += d * d;
        }
      }
      var = ss / static_cast<double>(count);
      const double unbiased = count > 1 ? ss / static_cast<double>(count - 1) : var;
      rm[c] = static_cast<float>((1.0 - cfg.momentum) * rm[c] + cfg.momentum * mu);
      rv[c] = static_cast<float>((1.0 - cfg.momentum) * rv[c] + cfg.momentum * unbiased);
    } else {
      mu = rm[c];
      var = rv[c];
    }
    const double istd = 1.0 / std::sqrt(var + cfg.eps);
    mean_used[c] = static_cast<float>(mu);
    inv_std[c] = static_cast<float>(istd);
    const float a = static_cast<float>(gamma[c] * istd);
    const float m = static_cast<float>(mu);
    for (std::int64_t b = 0; b < batch; ++b) {
      const float* src = x + (b * channels + c) * plane;
      float* dst = out.data() + (b * channels + c) * plane;
      for (std::int64_t i = 0; i < plane; ++i) dst[i] = (src[i] - m) * a + beta[c];
    }
  }

  return Tensor::make_result(
      input.shape(), std::move(out), {input, scale, shift},
      [=](detail::Node& self) {
        const float* gy = self.grad.data();
        auto& in_node = input.node();
        auto& g_node = scale.node();
        auto& b_node = shift.node();
        const float* xv = in_node.data.data();
        const float* gam = g_node.data.data();
        float* gx = in_node.requires_grad ? in_node.ensure_grad().data() : nullptr;
        float* gg = g_node.requires_grad ? g_node.ensure_grad().data() : nullptr;
        float* gb = b_node.requires_grad ? b_node.ensure_grad().data() : nullptr;
        const double n = static_cast<double>(count);
        for (std::int64_t c = 0; c < channels; ++c) {
          const double m = mean_used[c];
          const double istd = inv_std[c];
          double sum_dy = 0.0, sum_dy_xhat = 0.0;
          for (std::int64_t b = 0; b < batch; ++b) {
            const std::int64_t off = (b * channels + c) * plane;
            for (std::int64_t i = 0; i < plane; ++i) {
              const double xhat = (xv[off + i] - m) * istd;
              sum_dy += gy[off + i];
              sum_dy_xhat += gy[off + i] * xhat;
            }
          }
          if (gg) gg[c] += static_cast<float>(sum_dy_xhat);
          if (gb) gb[c] += static_cast<float>(sum_dy);
          if (!gx) continue;
          const double gmm = gam[c];
          for (std::int64_t b = 0; b < batch; ++b) {
            const std::int64_t off = (b * channels + c) * plane;
            for (std::int64_t i = 0; i < plane; ++i) {
              if (training) {
                const double xhat = (xv[off + i] - m) * istd;
                gx[off + i] += static_cast<float>(gmm * istd / n * (n * gy[off + i] - sum_dy - xhat * sum_dy_xhat));
              } else {
                gx[off + i] += static_cast<float>(gmm * istd * gy[off + i]);
              }
            }
          }
        }
      });
}

}  // namespace remaster
