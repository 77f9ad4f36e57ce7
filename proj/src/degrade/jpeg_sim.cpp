#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"

namespace remaster {

namespace {

constexpr std::array<int, 64> kLumaTable{16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
                                         14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
                                         18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
                                         49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<int, 64> kChromaTable{17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
                                           24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
                                           99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
                                           99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

std::array<double, 64> scaled_table(const std::array<int, 64>& base, int quality) {
  quality = std::clamp(quality, 1, 100);
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> out{};
  for (int i = 0; i < 64; ++i) out[i] = std::clamp((base[i] * scale + 50) / 100, 1, 255);
  return out;
}

struct Dct8 {
  std::array<double, 64> c{};  // c[u * 8 + x]
  Dct8() {
    for (int u = 0; u < 8; ++u)
      for (int x = 0; x < 8; ++x) {
        const double a = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
        c[u * 8 + x] = a * std::cos((2.0 * x + 1.0) * u * std::numbers::pi / 16.0);
      }
  }
};

const Dct8& dct() {
  static const Dct8 d;
  return d;
}

// Quantises one plane in 0..255 units in place.
void process_plane(float* plane, std::int64_t h, std::int64_t w, const std::array<double, 64>& q) {
  const auto& c = dct().c;
  for (std::int64_t by = 0; by < h; by += 8) {
    for (std::int64_t bx = 0; bx < w; bx += 8) {
      double block[64], tmp[64], coef[64];
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
          const std::int64_t sy = std::min(by + y, h - 1), sx = std::min(bx + x, w - 1);
          block[y * 8 + x] = plane[sy * w + sx] - 128.0;
        }
      for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int x = 0; x < 8; ++x) s += c[u * 8 + x] * block[y * 8 + x];
          tmp[y * 8 + u] = s;
        }
      for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
          double s = 0;
          for (int y = 0; y < 8; ++y) s += c[v * 8 + y] * tmp[y * 8 + u];
          coef[v * 8 + u] = std::round(s / q[v * 8 + u]) * q[v * 8 + u];
        }
      for (int v = 0; v < 8; ++v)
        for (int x = 0; x < 8; ++x) {
          double s = 0;
          for (int u = 0; u < 8; ++u) s += c[u * 8 + x] * coef[v * 8 + u];
          tmp[v * 8 + x] = s;
        }
      for (int y = 0; y < 8 && by + y < h; ++y)
        for (int x = 0; x < 8 && bx + x < w; ++x) {
          double s = 0;
          for (int v = 0; v < 8; ++v) s += c[v * 8 + y] * tmp[v * 8 + x];
          plane[(by + y) * w + bx + x] = static_cast<float>(std::clamp(std::round(s + 128.0), 0.0, 255.0));
        }
    }
  }
}

}  // namespace

Image jpeg_simulate(const Image& img, int quality) {
  if (img.channels != 1 && img.channels != 3) throw DimensionError("channels", "JPEG simulation needs 1 or 3 channels");
  const auto luma_q = scaled_table(kLumaTable, quality);
  const std::int64_t n = img.plane();
  Image out = img;
  if (img.channels == 1) {
    for (auto& v : out.data) v = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f);
    process_plane(out.channel(0), img.height, img.width, luma_q);
    for (auto& v : out.data) v /= 255.0f;
    return out;
  }
  // JFIF YCbCr, no chroma subsampling.
  Image ycc = Image::zeros(3, img.height, img.width);
  for (std::int64_t i = 0; i < n; ++i) {
    const double r = std::round(std::clamp(img.channel(0)[i], 0.0f, 1.0f) * 255.0f);
    const double g = std::round(std::clamp(img.channel(1)[i], 0.0f, 1.0f) * 255.0f);
    const double b = std::round(std::clamp(img.channel(2)[i], 0.0f, 1.0f) * 255.0f);
    ycc.channel(0)[i] = static_cast<float>(0.299 * r + 0.587 * g + 0.114 * b);
    ycc.channel(1)[i] = static_cast<float>(-0.168736 * r - 0.331264 * g + 0.5 * b + 128.0);
    ycc.channel(2)[i] = static_cast<float>(0.5 * r - 0.418688 * g - 0.081312 * b + 128.0);
  }
  const auto chroma_q = scaled_table(kChromaTable, quality);
  process_plane(ycc.channel(0), img.height, img.width, luma_q);
  process_plane(ycc.channel(1), img.height, img.width, chroma_q);
  process_plane(ycc.channel(2), img.height, img.width, chroma_q);
  for (std::int64_t i = 0; i < n; ++i) {
    const double y = ycc.channel(0)[i], cb = ycc.channel(1)[i] - 128.0, cr = ycc.channel(2)[i] - 128.0;
    out.channel(0)[i] = static_cast<float>(std::clamp((y + 1.402 * cr) / 255.0, 0.0, 1.0));
    out.channel(1)[i] = static_cast<float>(std::clamp((y - 0.344136 * cb - 0.714136 * cr) / 255.0, 0.0, 1.0));
    out.channel(2)[i] = static_cast<float>(std::clamp((y + 1.772 * cb) / 255.0, 0.0, 1.0));
  }
  return out;
}

}  // namespace remaster
