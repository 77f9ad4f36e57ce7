#pragma once

#include <cmath>

#include "remaster/rng.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

/// He-uniform initialisation over the fan-in: U(-sqrt(6/fan_in), sqrt(6/fan_in)).
inline Tensor kaiming_uniform(Shape shape, std::int64_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  std::vector<float> data(static_cast<std::size_t>(shape_numel(shape)));
  for (auto& v : data) v = static_cast<float>(rng.uniform(-bound, bound));
  return Tensor::from_data(std::move(shape), std::move(data), true);
}

}  // namespace remaster
