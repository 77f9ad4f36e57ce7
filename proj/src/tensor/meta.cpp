#include "remaster/meta.hpp"

#include <string>

#include "remaster/errors.hpp"

namespace remaster {

MetaTensor conv3d(const MetaTensor& input, const ConvSpec& spec) {
  spec.validate();
  if (input.shape.size() != 5) throw DimensionError("rank", "conv3d input must be rank 5");
  if (input.dim(kChannel) != spec.in_channels) {
    throw DimensionError("channels", "conv3d expects " + std::to_string(spec.in_channels) + " input channels, got " +
                                         std::to_string(input.dim(kChannel)));
  }
  return {{input.dim(kBatch), spec.out_channels, ConvSpec::output_extent(input.dim(kTime), spec.stride[0]),
           ConvSpec::output_extent(input.dim(kHeight), spec.stride[1]),
           ConvSpec::output_extent(input.dim(kWidth), spec.stride[2])}};
}

MetaTensor trilinear_resize(const MetaTensor& input, std::array<std::int64_t, 3> target) {
  return {{input.dim(kBatch), input.dim(kChannel), target[0], target[1], target[2]}};
}

MetaTensor concat_channels(const MetaTensor& a, const MetaTensor& b) {
  for (int axis : {kBatch, kTime, kHeight, kWidth}) {
    if (a.dim(axis) != b.dim(axis)) throw DimensionError(axis5_name(axis), "concat_channels dimension mismatch");
  }
  MetaTensor out = a;
  out.shape[kChannel] += b.dim(kChannel);
  return out;
}

}  // namespace remaster
