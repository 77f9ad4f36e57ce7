#include <algorithm>
#include <cmath>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/ops.hpp"

namespace remaster {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    // Name the first disagreeing axis.
    std::string axis = "rank";
    if (a.rank() == b.rank()) {
      for (int i = 0; i < a.rank(); ++i) {
        if (a.dim(i) != b.dim(i)) {
          axis = a.rank() == 5 ? axis5_name(i) : "axis " + std::to_string(i);
          break;
        }
      }
    }
    throw DimensionError(axis, std::string(op) + ": shape " + shape_to_string(a.shape()) + " vs " +
                                   shape_to_string(b.shape()));
  }
}

template <class Fwd, class Bwd>
Tensor unary(const Tensor& x, Fwd fwd, Bwd dydx) {
  const auto in = x.data();
  std::vector<float> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = fwd(in[i]);
  return Tensor::make_result(x.shape(), std::move(out), {x}, [x, dydx](detail::Node& self) {
    auto& xn = x.node();
    if (!xn.requires_grad) return;
    auto& g = xn.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dydx(xn.data[i], self.data[i]);
  });
}

}  // namespace

Tensor activation(const Tensor& input, Activation kind) {
  switch (kind) {
    case Activation::kNone:
      return input;
    case Activation::kElu:
      return unary(
          input, [](float v) { return v > 0.0f ? v : std::expm1(v); },
          [](float v, float y) { return v > 0.0f ? 1.0f : y + 1.0f; });
    case Activation::kTanh:
      return unary(
          input, [](float v) { return std::tanh(v); }, [](float, float y) { return 1.0f - y * y; });
    case Activation::kSigmoid:
      return unary(
          input,
          [](float v) {
            // Split by sign so exp never overflows.
            if (v >= 0.0f) return 1.0f / (1.0f + std::exp(-v));
            const float e = std::exp(v);
            return e / (1.0f + e);
          },
          [](float, float y) { return y * (1.0f - y); });
  }
  return input;
}

Tensor clamp(const Tensor& x, float lo, float hi) {
  return unary(
      x, [lo, hi](float v) { return std::clamp(v, lo, hi); },
      [lo, hi](float v, float) { return (v >= lo && v <= hi) ? 1.0f : 0.0f; });
}

Tensor scale(const Tensor& x, float factor) {
  return unary(
      x, [factor](float v) { return v * factor; }, [factor](float, float) { return factor; });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [a, b](detail::Node& self) {
    for (const Tensor* t : {&a, &b}) {
      auto& n = t->node();
      if (!n.requires_grad) continue;
      auto& g = n.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [a, b](detail::Node& self) {
    if (auto& n = a.node(); n.requires_grad) {
      auto& g = n.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (auto& n = b.node(); n.requires_grad) {
      auto& g = n.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<float> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return Tensor::make_result(a.shape(), std::move(out), {a, b}, [a, b](detail::Node& self) {
    auto& an = a.node();
    auto& bn = b.node();
    if (an.requires_grad) {
      auto& g = an.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * bn.data[i];
    }
    if (bn.requires_grad) {
      auto& g = bn.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * an.data[i];
    }
  });
}

Tensor mul_scalar(const Tensor& x, const Tensor& s) {
  if (s.numel() != 1) throw DimensionError("rank", "mul_scalar expects a one-element factor");
  const float f = s.item();
  const auto xv = x.data();
  std::vector<float> out(xv.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = xv[i] * f;
  return Tensor::make_result(x.shape(), std::move(out), {x, s}, [x, s](detail::Node& self) {
    auto& xn = x.node();
    auto& sn = s.node();
    if (xn.requires_grad) {
      auto& g = xn.ensure_grad();
      const float f = sn.data[0];
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * f;
    }
    if (sn.requires_grad) {
      double acc = 0.0;
      for (std::size_t i = 0; i < xn.data.size(); ++i) acc += static_cast<double>(self.grad[i]) * xn.data[i];
      sn.ensure_grad()[0] += static_cast<float>(acc);
    }
  });
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (float v : x.data()) s += v;
  return Tensor::make_result({1}, {static_cast<float>(s)}, {x}, [x](detail::Node& self) {
    auto& xn = x.node();
    if (!xn.requires_grad) return;
    auto& g = xn.ensure_grad();
    for (auto& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  if (x.numel() == 0) throw DimensionError("rank", "mean of empty tensor");
  return scale(sum(x), 1.0f / static_cast<float>(x.numel()));
}

Tensor l1_loss(const Tensor& pred, const Tensor& target) {
  require_same_shape(pred, target, "l1_loss");
  const auto pv = pred.data();
  const auto tv = target.data();
  if (pv.empty()) throw DimensionError("rank", "l1_loss of empty tensors");
  double s = 0.0;
  for (std::size_t i = 0; i < pv.size(); ++i) s += std::fabs(static_cast<double>(pv[i]) - tv[i]);
  const double n = static_cast<double>(pv.size());
  return Tensor::make_result({1}, {static_cast<float>(s / n)}, {pred, target}, [pred, target, n](detail::Node& self) {
    auto& pn = pred.node();
    auto& tn = target.node();
    const float g0 = static_cast<float>(self.grad[0] / n);
    for (int side = 0; side < 2; ++side) {
      auto& nd = side == 0 ? pn : tn;
      if (!nd.requires_grad) continue;
      auto& g = nd.ensure_grad();
      const float sign = side == 0 ? 1.0f : -1.0f;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const float d = pn.data[i] - tn.data[i];
        if (d > 0.0f) g[i] += sign * g0;
        else if (d < 0.0f) g[i] -= sign * g0;
      }
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw DimensionError("rank", "reshape " + shape_to_string(x.shape()) + " -> " + shape_to_string(shape));
  }
  std::vector<float> out(x.data().begin(), x.data().end());
  return Tensor::make_result(std::move(shape), std::move(out), {x}, [x](detail::Node& self) {
    auto& xn = x.node();
    if (!xn.requires_grad) return;
    auto& g = xn.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.rank() != 5 || b.rank() != 5) throw DimensionError("rank", "concat_channels expects rank-5 tensors");
  for (int axis : {kBatch, kTime, kHeight, kWidth}) {
    if (a.dim(axis) != b.dim(axis)) {
      throw DimensionError(axis5_name(axis), "concat_channels: " + shape_to_string(a.shape()) + " vs " +
                                                 shape_to_string(b.shape()));
    }
  }
  const std::int64_t batch = a.dim(kBatch);
  const std::int64_t plane = a.dim(kTime) * a.dim(kHeight) * a.dim(kWidth);
  const std::int64_t ca = a.dim(kChannel) * plane;
  const std::int64_t cb = b.dim(kChannel) * plane;
  std::vector<float> out(static_cast<std::size_t>(batch * (ca + cb)));
  const float* av = a.data().data();
  const float* bv = b.data().data();
  for (std::int64_t n = 0; n < batch; ++n) {
    std::copy_n(av + n * ca, ca, out.begin() + n * (ca + cb));
    std::copy_n(bv + n * cb, cb, out.begin() + n * (ca + cb) + ca);
  }
  Shape shape = a.shape();
  shape[kChannel] += b.dim(kChannel);
  return Tensor::make_result(std::move(shape), std::move(out), {a, b}, [a, b, batch, ca, cb](detail::Node& self) {
    auto& an = a.node();
    auto& bn = b.node();
    for (std::int64_t n = 0; n < batch; ++n) {
      const float* src = self.grad.data() + n * (ca + cb);
      if (an.requires_grad) {
        float* g = an.ensure_grad().data() + n * ca;
        for (std::int64_t i = 0; i < ca; ++i) g[i] += src[i];
      }
      if (bn.requires_grad) {
        float* g = bn.ensure_grad().data() + n * cb;
        for (std::int64_t i = 0; i < cb; ++i) g[i] += src[ca + i];
      }
    }
  });
}

}  // namespace remaster
