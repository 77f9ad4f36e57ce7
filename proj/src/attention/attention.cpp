#include "remaster/attention.hpp"

#include <string>

#include "remaster/errors.hpp"
#include "remaster/init.hpp"
#include "remaster/ops.hpp"

namespace remaster {

AttentionParams AttentionParams::create(std::int64_t channels, std::int64_t ref_channels, Rng& rng, float gamma_init) {
  if (channels <= 0 || channels % 8 != 0) {
    throw DimensionError("channels", "attention channels must be a positive multiple of 8, got " + std::to_string(channels));
  }
  if (ref_channels <= 0) throw DimensionError("channels", "attention reference channels must be positive");
  AttentionParams p;
  p.channels = channels;
  p.ref_channels = ref_channels;
  p.reduced = channels / 8;
  p.source_key_weight = kaiming_uniform({p.reduced, channels, 1, 1, 1}, channels, rng);
  p.source_key_bias = Tensor::zeros({p.reduced}, true);
  p.ref_key_weight = kaiming_uniform({p.reduced, ref_channels, 1, 1, 1}, ref_channels, rng);
  p.ref_key_bias = Tensor::zeros({p.reduced}, true);
  p.ref_value_weight = kaiming_uniform({channels, ref_channels, 1, 1, 1}, ref_channels, rng);
  p.ref_value_bias = Tensor::zeros({channels}, true);
  p.gamma = Tensor::scalar(gamma_init, true);
  return p;
}

namespace {

void validate(const Shape& hs, const Shape* hr, const AttentionParams& params) {
  if (params.channels % 8 != 0 || params.reduced * 8 != params.channels) {
    throw DimensionError("channels", "attention channels must be divisible by 8");
  }
  if (hs.size() != 5) throw DimensionError("rank", "attention source must be rank 5");
  if (hs[kChannel] != params.channels) {
    throw DimensionError("channels", "attention source has " + std::to_string(hs[kChannel]) + " channels, expected " +
                                         std::to_string(params.channels));
  }
  if (!hr) return;
  if (hr->size() != 5) throw DimensionError("rank", "attention reference must be rank 5");
  if ((*hr)[kBatch] != hs[kBatch]) throw DimensionError("batch", "attention source/reference batch mismatch");
  if ((*hr)[kChannel] != params.ref_channels) {
    throw DimensionError("channels", "attention reference has " + std::to_string((*hr)[kChannel]) +
                                         " channels, expected " + std::to_string(params.ref_channels));
  }
}

bool reference_absent(const Shape& hr) { return shape_numel(hr) == 0; }

void fill_probe(AttentionProbe* probe, const Shape& hs, const Shape& hr) {
  if (!probe) return;
  probe->source_positions = hs[kTime] * hs[kHeight] * hs[kWidth];
  probe->reference_positions = hr[kTime] * hr[kHeight] * hr[kWidth];
  probe->matrix_elements = probe->source_positions * probe->reference_positions;
}

}  // namespace

Tensor source_reference_attention(const Tensor& h_s, const Tensor& h_r, const AttentionParams& params,
                                  AttentionProbe* probe) {
  const bool has_ref = h_r.defined() && !reference_absent(h_r.shape());
  validate(h_s.shape(), has_ref ? &h_r.shape() : nullptr, params);
  check_finite(h_s, "attention source");
  if (probe) {
    const bool keep = probe->keep_weights;
    *probe = AttentionProbe{};
    probe->keep_weights = keep;
  }
  if (!has_ref) return h_s;
  check_finite(h_r, "attention reference");
  fill_probe(probe, h_s.shape(), h_r.shape());

  const std::int64_t batch = h_s.dim(kBatch);
  const std::int64_t ns = h_s.dim(kTime) * h_s.dim(kHeight) * h_s.dim(kWidth);
  const std::int64_t nr = h_r.dim(kTime) * h_r.dim(kHeight) * h_r.dim(kWidth);
  const std::int64_t c = params.channels, cr = params.reduced;

  const Tensor keys_s = reshape(conv3d(h_s, params.source_key_weight, params.source_key_bias,
                                       ConvSpec::pointwise(c, cr)),
                                {batch, cr, ns});
  const Tensor keys_r = reshape(conv3d(h_r, params.ref_key_weight, params.ref_key_bias,
                                       ConvSpec::pointwise(params.ref_channels, cr)),
                                {batch, cr, nr});
  const Tensor values = reshape(conv3d(h_r, params.ref_value_weight, params.ref_value_bias,
                                       ConvSpec::pointwise(params.ref_channels, c)),
                                {batch, c, nr});
  // (B, N_r, N_s): each column is one source position's weights over references.
  const Tensor weights = softmax_axis(matmul_batched(keys_r, keys_s, /*transpose_a=*/true), 1);
  if (probe && probe->keep_weights) probe->weights = weights.detach();
  const Tensor attended = reshape(matmul_batched(values, weights), h_s.shape());
  return add(h_s, mul_scalar(attended, params.gamma));
}

Tensor self_attention(const Tensor& h, const AttentionParams& params, AttentionProbe* probe) {
  return source_reference_attention(h, h, params, probe);
}

MetaTensor source_reference_attention(const MetaTensor& h_s, const MetaTensor* h_r, const AttentionParams& params,
                                      AttentionProbe* probe) {
  const bool has_ref = h_r && !reference_absent(h_r->shape);
  validate(h_s.shape, has_ref ? &h_r->shape : nullptr, params);
  if (probe) *probe = AttentionProbe{};
  if (has_ref) fill_probe(probe, h_s.shape, h_r->shape);
  return h_s;
}

MetaTensor self_attention(const MetaTensor& h, const AttentionParams& params, AttentionProbe* probe) {
  return source_reference_attention(h, &h, params, probe);
}

}  // namespace remaster
