#include <cmath>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/training.hpp"

namespace remaster {

Adadelta::Adadelta(std::vector<Tensor> params, AdadeltaConfig cfg) : params_(std::move(params)), cfg_(cfg) {
  if (!(cfg_.rho >= 0.0 && cfg_.rho < 1.0)) throw std::invalid_argument("ADADELTA rho must be in [0, 1)");
  if (!(cfg_.eps > 0.0)) throw std::invalid_argument("ADADELTA eps must be positive");
  for (const auto& p : params_) {
    square_grad_.emplace_back(static_cast<std::size_t>(p.numel()), 0.0f);
    square_delta_.emplace_back(static_cast<std::size_t>(p.numel()), 0.0f);
  }
}

void Adadelta::zero_grad() {
  for (auto& p : params_) {
    auto g = p.mutable_grad();
    std::fill(g.begin(), g.end(), 0.0f);
  }
}

void Adadelta::step() {
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (!params_[k].has_grad()) throw AutogradError("ADADELTA step: parameter " + std::to_string(k) + " has no gradient");
  }
  const double rho = cfg_.rho, eps = cfg_.eps;
  for (std::size_t k = 0; k < params_.size(); ++k) {
    Tensor& p = params_[k];
    const auto g = p.grad();
    auto x = p.mutable_data();
    auto& eg = square_grad_[k];
    auto& ed = square_delta_[k];
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (n > 65536)
    for (std::int64_t i = 0; i < n; ++i) {
      const double gi = g[i];
      const double e_g = rho * eg[i] + (1.0 - rho) * gi * gi;
      const double dx = -std::sqrt(ed[i] + eps) / std::sqrt(e_g + eps) * gi;
      eg[i] = static_cast<float>(e_g);
      ed[i] = static_cast<float>(rho * ed[i] + (1.0 - rho) * dx * dx);
      x[i] = static_cast<float>(x[i] + dx);
    }
  }
}

}  // namespace remaster
