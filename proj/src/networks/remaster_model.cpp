#include "remaster/networks.hpp"

namespace remaster {

RemasterModel::RemasterModel(NetworkConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(cfg_.seed);
  preprocess_ = std::make_unique<PreprocessNet>(cfg_, rng, store_);
  srnet_ = std::make_unique<SourceRefNet>(cfg_, rng, store_);
}

RemasterModel::Output RemasterModel::forward(const Tensor& x, const Tensor& refs, const ForwardContext& ctx) const {
  Output out;
  out.luma = preprocess_->forward(x, ctx);
  out.chroma = srnet_->forward(out.luma, refs, ctx);
  return out;
}

ShapeTrace RemasterModel::describe(const Shape& x, const Shape& refs) const {
  ShapeTrace trace;
  ForwardContext ctx{.training = false, .trace = &trace};
  const MetaTensor mx{x};
  const MetaTensor mr{refs};
  const MetaTensor luma = preprocess_->forward(mx, ctx);
  srnet_->forward(luma, refs.empty() ? nullptr : &mr, ctx);
  return trace;
}

}  // namespace remaster
