#pragma once

#include <array>
#include <cstdint>

#include "remaster/ops.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

/// Shape-only stand-in for a Tensor. The networks are written once over a
/// value type, so running them on MetaTensor walks the exact layer sequence
/// without allocating feature maps.
struct MetaTensor {
  Shape shape;

  std::int64_t dim(int axis) const { return shape.at(static_cast<std::size_t>(axis)); }
  std::int64_t numel() const { return shape_numel(shape); }
};

MetaTensor conv3d(const MetaTensor& input, const ConvSpec& spec);
MetaTensor trilinear_resize(const MetaTensor& input, std::array<std::int64_t, 3> target);
MetaTensor concat_channels(const MetaTensor& a, const MetaTensor& b);

}  // namespace remaster

namespace remaster {

inline const Shape& shape_of(const Tensor& t) { return t.shape(); }
inline const Shape& shape_of(const MetaTensor& m) { return m.shape; }

}  // namespace remaster
