#include <cmath>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/training.hpp"

namespace remaster {

void LossConfig::validate() const {
  if (!(beta >= 0.0f) || !std::isfinite(beta)) throw std::invalid_argument("beta must be a finite non-negative number");
}

Tensor joint_loss(const Tensor& pred_l, const Tensor& pred_ab, const Tensor& y_l, const Tensor& y_ab,
                  const LossConfig& cfg) {
  cfg.validate();
  // A zero beta still keeps the chrominance term in the graph so that the
  // colorization parameters receive exactly-zero gradients.
  return add(l1_loss(pred_l, y_l), scale(l1_loss(pred_ab, y_ab), cfg.beta));
}

}  // namespace remaster
