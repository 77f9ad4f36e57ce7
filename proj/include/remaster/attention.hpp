#pragma once

#include <cstdint>

#include "remaster/meta.hpp"
#include "remaster/rng.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

/// Learnt state of one source-reference attention layer: three pointwise
/// encoders and the residual gate gamma.
struct AttentionParams {
  std::int64_t channels = 0;      // C (source)
  std::int64_t ref_channels = 0;  // C_r (reference)
  std::int64_t reduced = 0;       // C' = C / 8

  Tensor source_key_weight, source_key_bias;  // e_s: C   -> C'
  Tensor ref_key_weight, ref_key_bias;        // e_r: C_r -> C'
  Tensor ref_value_weight, ref_value_bias;    // e_t: C_r -> C
  Tensor gamma;                               // one element

  /// Throws DimensionError unless channels is a positive multiple of 8.
  static AttentionParams create(std::int64_t channels, std::int64_t ref_channels, Rng& rng, float gamma_init = 0.0f);
};

/// Optional instrumentation for one attention evaluation.
struct AttentionProbe {
  std::int64_t matrix_elements = 0;  // per batch element: (N_r H_r W_r) x (T_s H_s W_s)
  std::int64_t reference_positions = 0;
  std::int64_t source_positions = 0;
  bool keep_weights = false;
  Tensor weights;  // (B, N_r H_r W_r, T_s H_s W_s) when keep_weights
};

/// h_s + gamma * reshape(e_t(h_r) softmax(e_r(h_r)^T e_s(h_s))), with the
/// softmax taken over reference positions for every source position.
/// An undefined h_r, or one with N_r = 0, returns h_s unchanged.
Tensor source_reference_attention(const Tensor& h_s, const Tensor& h_r, const AttentionParams& params,
                                  AttentionProbe* probe = nullptr);

/// Source-reference attention with the source used as its own reference.
Tensor self_attention(const Tensor& h, const AttentionParams& params, AttentionProbe* probe = nullptr);

MetaTensor source_reference_attention(const MetaTensor& h_s, const MetaTensor* h_r, const AttentionParams& params,
                                      AttentionProbe* probe = nullptr);
MetaTensor self_attention(const MetaTensor& h, const AttentionParams& params, AttentionProbe* probe = nullptr);

}  // namespace remaster
