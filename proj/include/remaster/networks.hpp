#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "remaster/attention.hpp"
#include "remaster/layers.hpp"

namespace remaster {

struct NetworkConfig {
  /// Divides every hidden channel width (1 = full size). Must be a power of
  /// two no larger than 64 so attention widths stay multiples of 8.
  int width_divisor = 1;
  /// Initial value of every attention gamma.
  float gamma_init = 0.0f;
  std::uint64_t seed = 0x5eed;

  void validate() const;
  /// Hidden width for a full-size channel count, never below 4.
  std::int64_t channels(std::int64_t full) const;
};

/// Restoration network: temporal-conv encoder/decoder over the greyscale clip
/// with an additive skip, output clamped to [0, 1].
class PreprocessNet {
 public:
  PreprocessNet(const NetworkConfig& cfg, Rng& rng, ParamStore& store);

  /// x: (B, 1, T, H, W) in [0, 1], H and W divisible by 4.
  Tensor forward(const Tensor& x, const ForwardContext& ctx) const;
  MetaTensor forward(const MetaTensor& x, const ForwardContext& ctx) const;

  const std::vector<ConvBlock>& blocks() const { return blocks_; }

 private:
  template <class V>
  V run(const V& x, const ForwardContext& ctx) const;

  std::vector<ConvBlock> blocks_;
};

/// Colorization network: separate spatial encoders for source luminance and
/// reference RGB images, middle branches at 1/16 and 1/8 resolution with
/// source-reference and self attention, and a temporal decoder emitting ab.
class SourceRefNet {
 public:
  SourceRefNet(const NetworkConfig& cfg, Rng& rng, ParamStore& store);

  /// luma: (B, 1, T, H, W); refs: (B, 3, N_r, H_r, W_r) RGB in [0, 1] or
  /// undefined / N_r = 0 for automatic mode. Returns (B, 2, T, H, W).
  Tensor forward(const Tensor& luma, const Tensor& refs, const ForwardContext& ctx) const;
  MetaTensor forward(const MetaTensor& luma, const MetaTensor* refs, const ForwardContext& ctx) const;

  const ConvBlock& output_block() const { return decoder_.back(); }
  std::vector<const AttentionParams*> attention_layers() const;

 private:
  template <class V>
  V run(const V& luma, const V* refs, const ForwardContext& ctx) const;

  std::vector<ConvBlock> source_encoder_, reference_encoder_;
  std::vector<ConvBlock> source_down16_, reference_down16_;
  AttentionParams attn16_, self16_;
  ConvBlock mid16_;
  AttentionParams attn8_, self8_;
  std::vector<ConvBlock> mid8_, merge8_;
  std::vector<ConvBlock> decoder_;
};

/// Full remastering model. The luminance of the result is the restoration
/// output; the chrominance is predicted from it.
class RemasterModel {
 public:
  explicit RemasterModel(NetworkConfig cfg = {});
  RemasterModel(const RemasterModel&) = delete;
  RemasterModel& operator=(const RemasterModel&) = delete;

  struct Output {
    Tensor luma;    // (B, 1, T, H, W)
    Tensor chroma;  // (B, 2, T, H, W)
  };

  Output forward(const Tensor& x, const Tensor& refs, const ForwardContext& ctx) const;
  /// Shape-only walk of the whole model; returns every layer's output shape.
  ShapeTrace describe(const Shape& x, const Shape& refs) const;

  const NetworkConfig& config() const { return cfg_; }
  ParamStore& params() { return store_; }
  const ParamStore& params() const { return store_; }
  const PreprocessNet& preprocess() const { return *preprocess_; }
  const SourceRefNet& srnet() const { return *srnet_; }

  static constexpr const char* kPreprocessPrefix = "pre.";
  static constexpr const char* kSourceRefPrefix = "sr.";

 private:
  NetworkConfig cfg_;
  ParamStore store_;
  std::unique_ptr<PreprocessNet> preprocess_;
  std::unique_ptr<SourceRefNet> srnet_;
};

/// Infers the width divisor a checkpointed model was built with from the
/// output channels of a full-size 512-wide layer (e.g. the last encoder conv),
/// or returns 0 if the count is not recognised.
int infer_width_divisor(std::int64_t widest_channels);

}  // namespace remaster
