#pragma once

#include <array>
#include <cstdint>

#include "remaster/tensor.hpp"

namespace remaster {

enum class Padding { kZero, kReplicate };

struct ConvSpec {
  std::int64_t in_channels = 1;
  std::int64_t out_channels = 1;
  std::array<std::int64_t, 3> kernel{3, 3, 3};  // (t, h, w), each odd
  std::array<std::int64_t, 3> stride{1, 1, 1};  // stride[0] must be 1
  Padding padding = Padding::kZero;

  static ConvSpec temporal(std::int64_t in, std::int64_t out, std::int64_t spatial_stride = 1,
                           Padding pad = Padding::kZero) {
    return {in, out, {3, 3, 3}, {1, spatial_stride, spatial_stride}, pad};
  }
  static ConvSpec spatial(std::int64_t in, std::int64_t out, std::int64_t spatial_stride = 1) {
    return {in, out, {1, 3, 3}, {1, spatial_stride, spatial_stride}, Padding::kZero};
  }
  static ConvSpec pointwise(std::int64_t in, std::int64_t out) { return {in, out, {1, 1, 1}, {1, 1, 1}, Padding::kZero}; }

  /// Output extent along one axis under same-size padding: ceil(in / stride).
  static std::int64_t output_extent(std::int64_t in, std::int64_t stride) { return (in + stride - 1) / stride; }
  void validate() const;
};

/// 3-D convolution over (T, H, W) with same-size padding.
/// input (B, Cin, T, H, W); weight (Cout, Cin, kt, kh, kw); bias (Cout) or undefined.
Tensor conv3d(const Tensor& input, const Tensor& weight, const Tensor& bias, const ConvSpec& spec);

/// Running statistics of a batch-norm layer; updated in place in training mode.
struct BatchNormStats {
  Tensor running_mean;  // (C)
  Tensor running_var;   // (C)
};

struct BatchNormConfig {
  float eps = 1e-5f;
  float momentum = 0.1f;
};

/// Per-channel normalisation over (B, T, H, W). Training mode uses batch
/// statistics (biased variance for normalising, unbiased for the running
/// estimate); inference mode uses the running statistics.
Tensor batch_norm(const Tensor& input, const Tensor& scale, const Tensor& shift, BatchNormStats& stats,
                  bool training, BatchNormConfig cfg = {});

enum class Activation { kNone, kElu, kTanh, kSigmoid };
Tensor activation(const Tensor& input, Activation kind);
inline Tensor elu(const Tensor& x) { return activation(x, Activation::kElu); }
inline Tensor tanh(const Tensor& x) { return activation(x, Activation::kTanh); }
inline Tensor sigmoid(const Tensor& x) { return activation(x, Activation::kSigmoid); }

/// Trilinear interpolation of a rank-5 tensor to (T, H, W), half-pixel
/// (align_corners = false) sampling with edge clamping.
Tensor trilinear_resize(const Tensor& input, std::array<std::int64_t, 3> target);

/// Batched product of rank-3 tensors: (B, M, K) x (B, K, N) -> (B, M, N).
/// The transpose flags read a as (B, K, M) and/or b as (B, N, K).
Tensor matmul_batched(const Tensor& a, const Tensor& b, bool transpose_a = false, bool transpose_b = false);

/// Numerically stabilised softmax along `axis`.
Tensor softmax_axis(const Tensor& x, int axis);

/// Channel concatenation of rank-5 tensors with equal (B, T, H, W).
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Same values, new shape with the same element count.
Tensor reshape(const Tensor& x, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
/// x * s where s is a one-element tensor (gradient flows to both).
Tensor mul_scalar(const Tensor& x, const Tensor& s);
Tensor scale(const Tensor& x, float factor);
Tensor clamp(const Tensor& x, float lo, float hi);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
/// Mean absolute difference. Subgradient of |d| at d = 0 is 0.
Tensor l1_loss(const Tensor& pred, const Tensor& target);

}  // namespace remaster
