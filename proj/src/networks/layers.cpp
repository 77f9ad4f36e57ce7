#include "remaster/layers.hpp"

#include <algorithm>

#include "remaster/errors.hpp"
#include "remaster/init.hpp"

namespace remaster {

Tensor ParamStore::add(std::string name, Tensor tensor, bool trainable) {
  if (find(name)) throw std::logic_error("duplicate parameter name " + name);
  tensor.set_requires_grad(trainable);
  entries_.push_back({std::move(name), tensor, trainable});
  return tensor;
}

std::vector<Tensor> ParamStore::trainable(const std::string& prefix) const {
  std::vector<Tensor> out;
  for (const auto& e : entries_) {
    if (e.trainable && e.name.starts_with(prefix)) out.push_back(e.tensor);
  }
  return out;
}

std::int64_t ParamStore::trainable_count(const std::string& prefix) const {
  std::int64_t n = 0;
  for (const auto& t : trainable(prefix)) n += t.numel();
  return n;
}

const NamedTensor* ParamStore::find(const std::string& name) const {
  auto it = std::find_if(entries_.begin(), entries_.end(), [&](const NamedTensor& e) { return e.name == name; });
  return it == entries_.end() ? nullptr : &*it;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) {
    Tensor t = e.tensor;
    t.zero_grad();
  }
}

std::map<std::string, std::vector<float>> ParamStore::snapshot() const {
  std::map<std::string, std::vector<float>> out;
  for (const auto& e : entries_) out[e.name].assign(e.tensor.data().begin(), e.tensor.data().end());
  return out;
}

void ParamStore::restore(const std::map<std::string, std::vector<float>>& values) {
  for (auto& e : entries_) {
    auto it = values.find(e.name);
    if (it == values.end()) throw CheckpointError("snapshot is missing tensor " + e.name);
    Tensor t = e.tensor;
    if (static_cast<std::int64_t>(it->second.size()) != t.numel()) {
      throw CheckpointError("snapshot size mismatch for " + e.name);
    }
    std::copy(it->second.begin(), it->second.end(), t.mutable_data().begin());
  }
}

ConvBlock ConvBlock::create(std::string name, ConvSpec spec, Rng& rng, ParamStore& store, bool normalize,
                            Activation act) {
  spec.validate();
  ConvBlock b;
  b.name = std::move(name);
  b.spec = spec;
  b.normalize = normalize;
  b.act = act;
  const std::int64_t fan_in = spec.in_channels * spec.kernel[0] * spec.kernel[1] * spec.kernel[2];
  b.weight = store.add(b.name + ".weight",
                       kaiming_uniform({spec.out_channels, spec.in_channels, spec.kernel[0], spec.kernel[1],
                                        spec.kernel[2]},
                                       fan_in, rng));
  b.bias = store.add(b.name + ".bias", Tensor::zeros({spec.out_channels}));
  if (normalize) {
    b.bn_scale = store.add(b.name + ".bn.scale", Tensor::full({spec.out_channels}, 1.0f));
    b.bn_shift = store.add(b.name + ".bn.shift", Tensor::zeros({spec.out_channels}));
    b.stats.running_mean = store.add(b.name + ".bn.running_mean", Tensor::zeros({spec.out_channels}), false);
    b.stats.running_var = store.add(b.name + ".bn.running_var", Tensor::full({spec.out_channels}, 1.0f), false);
  }
  return b;
}

Tensor ConvBlock::operator()(const Tensor& x, const ForwardContext& ctx) const {
  Tensor y = conv3d(x, weight, bias, spec);
  if (normalize) {
    BatchNormStats s = stats;
    y = batch_norm(y, bn_scale, bn_shift, s, ctx.training);
  }
  y = activation(y, act);
  ctx.record(name, y.shape());
  return y;
}

MetaTensor ConvBlock::operator()(const MetaTensor& x, const ForwardContext& ctx) const {
  MetaTensor y = conv3d(x, spec);
  ctx.record(name, y.shape);
  return y;
}

}  // namespace remaster
