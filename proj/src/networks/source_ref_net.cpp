#include <string>

#include "remaster/errors.hpp"
#include "remaster/networks.hpp"

namespace remaster {

namespace {

Tensor attend(const Tensor& hs, const Tensor* hr, const AttentionParams& p, AttentionProbe* probe) {
  return source_reference_attention(hs, hr ? *hr : Tensor(), p, probe);
}
MetaTensor attend(const MetaTensor& hs, const MetaTensor* hr, const AttentionParams& p, AttentionProbe* probe) {
  return source_reference_attention(hs, hr, p, probe);
}

bool has_references(const Tensor* refs) { return refs && refs->defined() && refs->numel() > 0; }
bool has_references(const MetaTensor* refs) { return refs && refs->numel() > 0; }

template <class V>
V attention_layer(const char* name, const V& hs, const V* hr, const AttentionParams& p, const ForwardContext& ctx) {
  AttentionProbe probe;
  V out = attend(hs, hr, p, &probe);
  ctx.record(name, shape_of(out), probe.matrix_elements);
  return out;
}

std::vector<ConvBlock> make_encoder(const std::string& prefix, std::int64_t in_channels, const NetworkConfig& cfg,
                                    Rng& rng, ParamStore& store) {
  auto c = [&](std::int64_t full) { return cfg.channels(full); };
  const ConvSpec specs[] = {
      ConvSpec::spatial(in_channels, c(64), 2), ConvSpec::spatial(c(64), c(128)),   ConvSpec::spatial(c(128), c(128)),
      ConvSpec::spatial(c(128), c(256), 2),     ConvSpec::spatial(c(256), c(256)),  ConvSpec::spatial(c(256), c(256)),
      ConvSpec::spatial(c(256), c(512), 2),     ConvSpec::spatial(c(512), c(512)),  ConvSpec::spatial(c(512), c(512)),
  };
  std::vector<ConvBlock> blocks;
  int i = 1;
  for (const auto& s : specs) blocks.push_back(ConvBlock::create(prefix + ".conv" + std::to_string(i++), s, rng, store));
  return blocks;
}

void register_attention(const std::string& prefix, const AttentionParams& p, ParamStore& store) {
  store.add(prefix + ".source_key.weight", p.source_key_weight);
  store.add(prefix + ".source_key.bias", p.source_key_bias);
  store.add(prefix + ".ref_key.weight", p.ref_key_weight);
  store.add(prefix + ".ref_key.bias", p.ref_key_bias);
  store.add(prefix + ".ref_value.weight", p.ref_value_weight);
  store.add(prefix + ".ref_value.bias", p.ref_value_bias);
  store.add(prefix + ".gamma", p.gamma);
}

}  // namespace

SourceRefNet::SourceRefNet(const NetworkConfig& cfg, Rng& rng, ParamStore& store) {
  cfg.validate();
  auto c = [&](std::int64_t full) { return cfg.channels(full); };
  const std::int64_t wide = c(512);

  source_encoder_ = make_encoder("sr.src_enc", 1, cfg, rng, store);
  reference_encoder_ = make_encoder("sr.ref_enc", 3, cfg, rng, store);

  // 1/16 branch: spatial stride-2 convs on both streams.
  source_down16_.push_back(ConvBlock::create("sr.src16.conv1", ConvSpec::spatial(wide, wide, 2), rng, store));
  source_down16_.push_back(ConvBlock::create("sr.src16.conv2", ConvSpec::spatial(wide, wide), rng, store));
  reference_down16_.push_back(ConvBlock::create("sr.ref16.conv1", ConvSpec::spatial(wide, wide, 2), rng, store));
  reference_down16_.push_back(ConvBlock::create("sr.ref16.conv2", ConvSpec::spatial(wide, wide), rng, store));
  reference_down16_.push_back(ConvBlock::create("sr.ref16.conv3", ConvSpec::spatial(wide, wide), rng, store));
  attn16_ = AttentionParams::create(wide, wide, rng, cfg.gamma_init);
  register_attention("sr.attn16", attn16_, store);
  mid16_ = ConvBlock::create("sr.mid16.conv1", ConvSpec::temporal(wide, wide), rng, store);
  self16_ = AttentionParams::create(wide, wide, rng, cfg.gamma_init);
  register_attention("sr.self16", self16_, store);

  // 1/8 branch; the upsampled 1/16 output joins at merge8.conv1.
  attn8_ = AttentionParams::create(wide, wide, rng, cfg.gamma_init);
  register_attention("sr.attn8", attn8_, store);
  mid8_.push_back(ConvBlock::create("sr.mid8.conv1", ConvSpec::temporal(wide, wide), rng, store));
  mid8_.push_back(ConvBlock::create("sr.mid8.conv2", ConvSpec::temporal(wide, wide), rng, store));
  merge8_.push_back(ConvBlock::create("sr.merge8.conv1", ConvSpec::temporal(2 * wide, wide), rng, store));
  merge8_.push_back(ConvBlock::create("sr.merge8.conv2", ConvSpec::temporal(wide, wide), rng, store));
  self8_ = AttentionParams::create(wide, wide, rng, cfg.gamma_init);
  register_attention("sr.self8", self8_, store);

  // Decoder: 1/8 -> 1/4 -> 1/2 -> 1, upsampling before the first conv of each stage.
  const ConvSpec dec[] = {
      ConvSpec::temporal(wide, c(256)),   ConvSpec::temporal(c(256), c(128)), ConvSpec::temporal(c(128), c(64)),
      ConvSpec::temporal(c(64), c(32)),   ConvSpec::temporal(c(32), c(16)),   ConvSpec::temporal(c(16), c(8)),
  };
  int i = 1;
  for (const auto& s : dec) decoder_.push_back(ConvBlock::create("sr.dec.conv" + std::to_string(i++), s, rng, store));
  decoder_.push_back(ConvBlock::create("sr.dec.conv7", ConvSpec::temporal(c(8), 2), rng, store, /*normalize=*/false,
                                       Activation::kSigmoid));
}

std::vector<const AttentionParams*> SourceRefNet::attention_layers() const {
  return {&attn16_, &self16_, &attn8_, &self8_};
}

template <class V>
V SourceRefNet::run(const V& luma, const V* refs, const ForwardContext& ctx) const {
  const std::int64_t t = luma.dim(kTime), h = luma.dim(kHeight), w = luma.dim(kWidth);
  const bool with_refs = has_references(refs);

  V src = luma;
  for (const auto& b : source_encoder_) src = b(src, ctx);
  V ref8;
  if (with_refs) {
    ref8 = *refs;
    for (const auto& b : reference_encoder_) ref8 = b(ref8, ctx);
  }

  // 1/16 branch
  V src16 = src;
  for (const auto& b : source_down16_) src16 = b(src16, ctx);
  V ref16;
  if (with_refs) {
    ref16 = ref8;
    for (const auto& b : reference_down16_) ref16 = b(ref16, ctx);
  }
  V mid16 = attention_layer("sr.attn16", src16, with_refs ? &ref16 : nullptr, attn16_, ctx);
  mid16 = mid16_(mid16, ctx);
  mid16 = attention_layer("sr.self16", mid16, &mid16, self16_, ctx);

  // 1/8 branch
  V mid8 = attention_layer("sr.attn8", src, with_refs ? &ref8 : nullptr, attn8_, ctx);
  for (const auto& b : mid8_) mid8 = b(mid8, ctx);
  V up16 = trilinear_resize(mid16, {t, mid8.dim(kHeight), mid8.dim(kWidth)});
  ctx.record("sr.up16", shape_of(up16));
  mid8 = concat_channels(mid8, up16);
  for (const auto& b : merge8_) mid8 = b(mid8, ctx);
  mid8 = attention_layer("sr.self8", mid8, &mid8, self8_, ctx);

  // Decoder
  V y = decoder_[0](mid8, ctx);
  y = trilinear_resize(y, {t, h / 4, w / 4});
  y = decoder_[1](y, ctx);
  y = decoder_[2](y, ctx);
  y = trilinear_resize(y, {t, h / 2, w / 2});
  y = decoder_[3](y, ctx);
  y = decoder_[4](y, ctx);
  y = trilinear_resize(y, {t, h, w});
  y = decoder_[5](y, ctx);
  y = decoder_[6](y, ctx);
  return y;
}

namespace {

void check_srnet_shapes(const Shape& luma, const Shape* refs) {
  if (luma.size() != 5 || luma[kChannel] != 1) {
    throw DimensionError("channels", "colorization input must be (B, 1, T, H, W), got " + shape_to_string(luma));
  }
  if (luma[kHeight] % 16 != 0) throw DimensionError("height", "colorization input height must be divisible by 16");
  if (luma[kWidth] % 16 != 0) throw DimensionError("width", "colorization input width must be divisible by 16");
  if (!refs || shape_numel(*refs) == 0) return;
  if (refs->size() != 5 || (*refs)[kChannel] != 3) {
    throw DimensionError("channels", "references must be (B, 3, N_r, H_r, W_r), got " + shape_to_string(*refs));
  }
  if ((*refs)[kBatch] != luma[kBatch]) throw DimensionError("batch", "reference batch does not match source batch");
  if ((*refs)[kHeight] % 16 != 0) throw DimensionError("height", "reference height must be divisible by 16");
  if ((*refs)[kWidth] % 16 != 0) throw DimensionError("width", "reference width must be divisible by 16");
}

}  // namespace

Tensor SourceRefNet::forward(const Tensor& luma, const Tensor& refs, const ForwardContext& ctx) const {
  check_srnet_shapes(luma.shape(), refs.defined() ? &refs.shape() : nullptr);
  check_finite(luma, "colorization input");
  if (refs.defined()) check_finite(refs, "reference images");
  return run(luma, refs.defined() ? &refs : nullptr, ctx);
}

MetaTensor SourceRefNet::forward(const MetaTensor& luma, const MetaTensor* refs, const ForwardContext& ctx) const {
  check_srnet_shapes(luma.shape, refs ? &refs->shape : nullptr);
  return run(luma, refs, ctx);
}

}  // namespace remaster
