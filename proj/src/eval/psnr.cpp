#include <cmath>
#include <string>

#include "remaster/colorspace.hpp"
#include "remaster/errors.hpp"
#include "remaster/eval.hpp"

namespace remaster {

const char* psnr_mode_name(PsnrMode mode) {
  switch (mode) {
    case PsnrMode::kRestoration: return "restoration";
    case PsnrMode::kColorization: return "colorization";
    case PsnrMode::kRemastering: return "remastering";
  }
  return "?";
}

PsnrMode parse_psnr_mode(const std::string& name) {
  if (name == "restoration") return PsnrMode::kRestoration;
  if (name == "colorization") return PsnrMode::kColorization;
  if (name == "remastering") return PsnrMode::kRemastering;
  throw std::invalid_argument("unknown mode '" + name + "' (expected restoration, colorization or remastering)");
}

namespace {

Shape lab_shape(const Tensor& t, const char* what) {
  Shape s = t.shape();
  if (s.size() == 5 && s[0] == 1) s.erase(s.begin());
  if (s.size() != 4 || s[0] != 3) {
    throw DimensionError("channels", std::string(what) + " must be (3, T, H, W) Lab, got " + shape_to_string(t.shape()));
  }
  return s;
}

}  // namespace

double masked_mse(const Tensor& pred, const Tensor& target, PsnrMode mode) {
  const Shape ps = lab_shape(pred, "prediction"), ts = lab_shape(target, "target");
  static const char* axes[] = {"channels", "time", "height", "width"};
  for (int i = 1; i < 4; ++i) {
    if (ps[static_cast<std::size_t>(i)] != ts[static_cast<std::size_t>(i)]) {
      throw DimensionError(axes[i], "prediction " + shape_to_string(pred.shape()) + " and target " +
                                        shape_to_string(target.shape()) + " disagree");
    }
  }
  const std::int64_t per_channel = ps[1] * ps[2] * ps[3];
  const int first = mode == PsnrMode::kColorization ? 1 : 0;
  const int last = mode == PsnrMode::kRestoration ? 1 : 3;
  const auto p = pred.data(), t = target.data();
  double sum = 0.0;
  for (std::int64_t i = first * per_channel; i < last * per_channel; ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(t[i]);
    sum += d * d;
  }
  return sum / static_cast<double>((last - first) * per_channel);
}

double psnr_from_mse(double mse) {
  if (!(mse >= 0.0)) throw std::invalid_argument("MSE must be non-negative");
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double psnr(const Tensor& pred, const Tensor& target, PsnrMode mode) {
  return psnr_from_mse(masked_mse(pred, target, mode));
}

Tensor lab_video(const std::vector<Image>& rgb) {
  if (rgb.empty()) throw DimensionError("time", "lab_video needs at least one frame");
  const std::int64_t t = static_cast<std::int64_t>(rgb.size()), h = rgb.front().height, w = rgb.front().width;
  const std::int64_t plane = h * w;
  std::vector<float> data(static_cast<std::size_t>(3 * t * plane));
  for (std::int64_t f = 0; f < t; ++f) {
    const Image& frame = rgb[static_cast<std::size_t>(f)];
    if (frame.height != h) throw DimensionError("height", "frames differ in height");
    if (frame.width != w) throw DimensionError("width", "frames differ in width");
    const Image lab = rgb_to_lab(frame);
    for (int c = 0; c < 3; ++c) std::copy_n(lab.channel(c), plane, data.begin() + (c * t + f) * plane);
  }
  return Tensor::from_data({3, t, h, w}, std::move(data));
}

}  // namespace remaster
