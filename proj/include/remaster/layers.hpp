#pragma once

#include <map>
#include <string>
#include <vector>

#include "remaster/meta.hpp"
#include "remaster/ops.hpp"
#include "remaster/rng.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

struct TraceEntry {
  std::string layer;
  Shape shape;
  std::int64_t attention_elements = -1;  // set for attention layers only
};
using ShapeTrace = std::vector<TraceEntry>;

struct ForwardContext {
  bool training = false;
  ShapeTrace* trace = nullptr;

  void record(const std::string& layer, const Shape& shape, std::int64_t attention_elements = -1) const {
    if (trace) trace->push_back({layer, shape, attention_elements});
  }
};

struct NamedTensor {
  std::string name;
  Tensor tensor;
  bool trainable = true;
};

/// Ordered registry of every tensor that makes up a model's state.
class ParamStore {
 public:
  Tensor add(std::string name, Tensor tensor, bool trainable = true);

  const std::vector<NamedTensor>& entries() const { return entries_; }
  std::vector<Tensor> trainable(const std::string& prefix = "") const;
  std::int64_t trainable_count(const std::string& prefix = "") const;
  const NamedTensor* find(const std::string& name) const;

  void zero_grad();

  /// Deep copy of every value, keyed by name.
  std::map<std::string, std::vector<float>> snapshot() const;
  void restore(const std::map<std::string, std::vector<float>>& values);

 private:
  std::vector<NamedTensor> entries_;
};

/// Convolution followed by optional batch norm and an activation.
struct ConvBlock {
  std::string name;
  ConvSpec spec;
  bool normalize = true;
  Activation act = Activation::kElu;
  Tensor weight, bias;
  Tensor bn_scale, bn_shift;
  BatchNormStats stats;

  static ConvBlock create(std::string name, ConvSpec spec, Rng& rng, ParamStore& store, bool normalize = true,
                          Activation act = Activation::kElu);

  Tensor operator()(const Tensor& x, const ForwardContext& ctx) const;
  MetaTensor operator()(const MetaTensor& x, const ForwardContext& ctx) const;
};

}  // namespace remaster
