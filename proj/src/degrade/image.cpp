#include "remaster/image.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "remaster/errors.hpp"

namespace remaster {

Image Image::zeros(std::int64_t channels, std::int64_t height, std::int64_t width) {
  return full(channels, height, width, 0.0f);
}

Image Image::full(std::int64_t channels, std::int64_t height, std::int64_t width, float value) {
  if (channels < 0 || height < 0 || width < 0) throw DimensionError("rank", "negative image dimension");
  Image img;
  img.channels = channels;
  img.height = height;
  img.width = width;
  img.data.assign(static_cast<std::size_t>(channels * height * width), value);
  return img;
}

namespace {

double cubic(double x) {
  constexpr double a = -0.5;
  x = std::fabs(x);
  if (x < 1.0) return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
  if (x < 2.0) return (((x - 5.0) * x + 8.0) * x - 4.0) * a;
  return 0.0;
}

struct Taps {
  std::vector<std::int64_t> start;
  std::vector<std::vector<double>> weights;
};

// Half-pixel aligned sampling positions; support widened when shrinking.
Taps make_taps(std::int64_t in, std::int64_t out) {
  Taps t;
  const double scale = static_cast<double>(in) / static_cast<double>(out);
  const double support = 2.0 * std::max(1.0, scale);
  const double stretch = std::max(1.0, scale);
  t.start.resize(static_cast<std::size_t>(out));
  t.weights.resize(static_cast<std::size_t>(out));
  for (std::int64_t o = 0; o < out; ++o) {
    const double center = (static_cast<double>(o) + 0.5) * scale - 0.5;
    const auto lo = static_cast<std::int64_t>(std::floor(center - support)) + 1;
    const auto hi = static_cast<std::int64_t>(std::floor(center + support));
    std::vector<double> w;
    double total = 0.0;
    for (std::int64_t i = lo; i <= hi; ++i) {
      const double v = cubic((static_cast<double>(i) - center) / stretch);
      w.push_back(v);
      total += v;
    }
    for (auto& v : w) v /= total;
    t.start[static_cast<std::size_t>(o)] = lo;
    t.weights[static_cast<std::size_t>(o)] = std::move(w);
  }
  return t;
}

}  // namespace

Image resize_bicubic(const Image& img, std::int64_t height, std::int64_t width) {
  if (height < 1 || width < 1) throw DimensionError("height", "resize target must be positive");
  if (img.height < 1 || img.width < 1) throw DimensionError("height", "cannot resize an empty image");
  if (height == img.height && width == img.width) return img;
  const Taps th = make_taps(img.height, height);
  const Taps tw = make_taps(img.width, width);
  Image mid = Image::zeros(img.channels, img.height, width);
  Image out = Image::zeros(img.channels, height, width);
  for (std::int64_t c = 0; c < img.channels; ++c) {
    for (std::int64_t y = 0; y < img.height; ++y) {
      const float* src = img.channel(c) + y * img.width;
      float* dst = mid.channel(c) + y * width;
      for (std::int64_t x = 0; x < width; ++x) {
        const auto& w = tw.weights[static_cast<std::size_t>(x)];
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          const std::int64_t i = std::clamp<std::int64_t>(tw.start[static_cast<std::size_t>(x)] + static_cast<std::int64_t>(k), 0, img.width - 1);
          s += w[k] * src[i];
        }
        dst[x] = static_cast<float>(s);
      }
    }
    for (std::int64_t y = 0; y < height; ++y) {
      const auto& w = th.weights[static_cast<std::size_t>(y)];
      float* dst = out.channel(c) + y * width;
      for (std::int64_t x = 0; x < width; ++x) {
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) {
          const std::int64_t i = std::clamp<std::int64_t>(th.start[static_cast<std::size_t>(y)] + static_cast<std::int64_t>(k), 0, img.height - 1);
          s += w[k] * mid.channel(c)[i * width + x];
        }
        dst[x] = static_cast<float>(s);
      }
    }
  }
  return out;
}

Image resize_shortest_edge(const Image& img, double edge) {
  const double shortest = static_cast<double>(std::min(img.height, img.width));
  const double s = edge / shortest;
  const auto h = std::max<std::int64_t>(1, std::llround(static_cast<double>(img.height) * s));
  const auto w = std::max<std::int64_t>(1, std::llround(static_cast<double>(img.width) * s));
  return resize_bicubic(img, h, w);
}

Image rotate(const Image& img, double degrees) {
  if (degrees == 0.0) return img;
  const double rad = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const double cy = (static_cast<double>(img.height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(img.width) - 1.0) / 2.0;
  Image out = Image::zeros(img.channels, img.height, img.width);
  for (std::int64_t y = 0; y < img.height; ++y) {
    for (std::int64_t x = 0; x < img.width; ++x) {
      // Inverse map of the output pixel into the source.
      const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(y) - cy;
      const double sx = std::clamp(cs * dx - sn * dy + cx, 0.0, static_cast<double>(img.width - 1));
      const double sy = std::clamp(sn * dx + cs * dy + cy, 0.0, static_cast<double>(img.height - 1));
      const auto x0 = static_cast<std::int64_t>(std::floor(sx)), y0 = static_cast<std::int64_t>(std::floor(sy));
      const std::int64_t x1 = std::min(x0 + 1, img.width - 1), y1 = std::min(y0 + 1, img.height - 1);
      const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
      for (std::int64_t c = 0; c < img.channels; ++c) {
        const double top = img.at(c, y0, x0) * (1.0 - fx) + img.at(c, y0, x1) * fx;
        const double bottom = img.at(c, y1, x0) * (1.0 - fx) + img.at(c, y1, x1) * fx;
        out.at(c, y, x) = static_cast<float>(top * (1.0 - fy) + bottom * fy);
      }
    }
  }
  return out;
}

Image flip_horizontal(const Image& img) {
  Image out = img;
  for (std::int64_t c = 0; c < img.channels; ++c)
    for (std::int64_t y = 0; y < img.height; ++y) {
      float* row = out.channel(c) + y * img.width;
      std::reverse(row, row + img.width);
    }
  return out;
}

Image flip_vertical(const Image& img) {
  Image out = img;
  for (std::int64_t c = 0; c < img.channels; ++c)
    for (std::int64_t y = 0; y < img.height; ++y)
      std::copy_n(img.channel(c) + (img.height - 1 - y) * img.width, img.width, out.channel(c) + y * img.width);
  return out;
}

Image crop(const Image& img, std::int64_t top, std::int64_t left, std::int64_t height, std::int64_t width) {
  if (top < 0 || left < 0 || top + height > img.height || left + width > img.width || height < 1 || width < 1) {
    throw DimensionError(top + height > img.height || top < 0 ? "height" : "width",
                         "crop " + std::to_string(height) + "x" + std::to_string(width) + " at (" + std::to_string(top) +
                             "," + std::to_string(left) + ") exceeds image " + std::to_string(img.height) + "x" +
                             std::to_string(img.width));
  }
  Image out = Image::zeros(img.channels, height, width);
  for (std::int64_t c = 0; c < img.channels; ++c)
    for (std::int64_t y = 0; y < height; ++y)
      std::copy_n(img.channel(c) + (top + y) * img.width + left, width, out.channel(c) + y * width);
  return out;
}

Image crop_fraction(const Image& img, double fy, double fx, std::int64_t height, std::int64_t width) {
  const auto top = static_cast<std::int64_t>(std::floor(fy * static_cast<double>(img.height - height + 1)));
  const auto left = static_cast<std::int64_t>(std::floor(fx * static_cast<double>(img.width - width + 1)));
  return crop(img, std::clamp<std::int64_t>(top, 0, std::max<std::int64_t>(0, img.height - height)),
              std::clamp<std::int64_t>(left, 0, std::max<std::int64_t>(0, img.width - width)), height, width);
}

void clamp01(Image& img) {
  for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
}

}  // namespace remaster
