#include <string>

#include "remaster/errors.hpp"
#include "remaster/networks.hpp"

namespace remaster {

void NetworkConfig::validate() const {
  const int d = width_divisor;
  if (d < 1 || d > 64 || (d & (d - 1)) != 0) {
    throw std::invalid_argument("width divisor must be a power of two in [1, 64], got " + std::to_string(d));
  }
}

std::int64_t NetworkConfig::channels(std::int64_t full) const {
  const std::int64_t c = full / width_divisor;
  return c < 4 ? 4 : c;
}

int infer_width_divisor(std::int64_t widest_channels) {
  for (int d = 1; d <= 64; d *= 2) {
    NetworkConfig cfg{.width_divisor = d};
    if (cfg.channels(512) == widest_channels) return d;
  }
  return 0;
}

namespace {

void require_divisible(std::int64_t h, std::int64_t w, std::int64_t by, const char* what) {
  if (h % by != 0) throw DimensionError("height", std::string(what) + " height must be divisible by " + std::to_string(by));
  if (w % by != 0) throw DimensionError("width", std::string(what) + " width must be divisible by " + std::to_string(by));
}

std::string layer_name(int i) { return std::string("pre.conv") + (i < 10 ? "0" : "") + std::to_string(i); }

Tensor skip_and_clamp(const Tensor& residual, const Tensor& x) { return clamp(add(residual, x), 0.0f, 1.0f); }
MetaTensor skip_and_clamp(const MetaTensor&, const MetaTensor& x) { return x; }

}  // namespace

PreprocessNet::PreprocessNet(const NetworkConfig& cfg, Rng& rng, ParamStore& store) {
  cfg.validate();
  auto c = [&](std::int64_t full) { return cfg.channels(full); };
  int i = 1;
  auto push = [&](ConvSpec spec, bool bn = true, Activation act = Activation::kElu) {
    blocks_.push_back(ConvBlock::create(layer_name(i++), spec, rng, store, bn, act));
  };
  // Full resolution -> 1/2, replication padded.
  push(ConvSpec::temporal(1, c(64), 2, Padding::kReplicate));
  push(ConvSpec::temporal(c(64), c(128)));
  push(ConvSpec::temporal(c(128), c(128)));
  // 1/4
  push(ConvSpec::temporal(c(128), c(256), 2));
  for (int r = 0; r < 4; ++r) push(ConvSpec::temporal(c(256), c(256)));
  // back to 1/2 (upsampled before the conv)
  push(ConvSpec::temporal(c(256), c(128)));
  push(ConvSpec::temporal(c(128), c(64)));
  push(ConvSpec::temporal(c(64), c(64)));
  // full resolution (upsampled before the conv)
  push(ConvSpec::temporal(c(64), c(16)));
  push(ConvSpec::temporal(c(16), 1), /*bn=*/false, Activation::kTanh);
}

template <class V>
V PreprocessNet::run(const V& x, const ForwardContext& ctx) const {
  const std::int64_t t = x.dim(kTime), h = x.dim(kHeight), w = x.dim(kWidth);
  V y = x;
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i == 8) y = trilinear_resize(y, {t, h / 2, w / 2});
    if (i == 11) y = trilinear_resize(y, {t, h, w});
    y = blocks_[i](y, ctx);
  }
  V out = skip_and_clamp(y, x);
  ctx.record("pre.output", shape_of(out));
  return out;
}

Tensor PreprocessNet::forward(const Tensor& x, const ForwardContext& ctx) const {
  if (x.rank() != 5 || x.dim(kChannel) != 1) {
    throw DimensionError("channels", "restoration input must be (B, 1, T, H, W), got " + shape_to_string(x.shape()));
  }
  require_divisible(x.dim(kHeight), x.dim(kWidth), 4, "restoration input");
  check_finite(x, "restoration input");
  for (float v : x.data()) {
    if (v < 0.0f || v > 1.0f) throw DataError("restoration input values must lie in [0, 1]");
  }
  return run(x, ctx);
}

MetaTensor PreprocessNet::forward(const MetaTensor& x, const ForwardContext& ctx) const {
  if (x.shape.size() != 5 || x.dim(kChannel) != 1) throw DimensionError("channels", "restoration input must be (B, 1, T, H, W)");
  require_divisible(x.dim(kHeight), x.dim(kWidth), 4, "restoration input");
  return run(x, ctx);
}

}  // namespace remaster
