#include "remaster/colorspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "remaster/errors.hpp"

namespace remaster {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

// Linear sRGB to XYZ (D65).
constexpr Mat3 kRgbToXyz{{{0.4124564, 0.3575761, 0.1804375},
                          {0.2126729, 0.7151522, 0.0721750},
                          {0.0193339, 0.1191920, 0.9503041}}};
constexpr std::array<double, 3> kWhite{0.95047, 1.0, 1.08883};

Mat3 invert(const Mat3& m) {
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 r{};
  r[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  r[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  r[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  r[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  r[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  r[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  r[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  r[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  r[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return r;
}

const Mat3& xyz_to_rgb() {
  static const Mat3 inv = invert(kRgbToXyz);
  return inv;
}

double srgb_to_linear(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }
double linear_to_srgb(double v) { return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055; }

constexpr double kDelta = 6.0 / 29.0;
double lab_f(double t) { return t > kDelta * kDelta * kDelta ? std::cbrt(t) : t / (3.0 * kDelta * kDelta) + 4.0 / 29.0; }
double lab_f_inv(double t) { return t > kDelta ? t * t * t : 3.0 * kDelta * kDelta * (t - 4.0 / 29.0); }

}  // namespace

Lab rgb_to_lab(double r, double g, double b) {
  const double lin[3] = {srgb_to_linear(r), srgb_to_linear(g), srgb_to_linear(b)};
  double f[3];
  for (int i = 0; i < 3; ++i) {
    const double v = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] + kRgbToXyz[i][2] * lin[2];
    f[i] = lab_f(v / kWhite[i]);
  }
  const double l = 116.0 * f[1] - 16.0;
  const double a = 500.0 * (f[0] - f[1]);
  const double bb = 200.0 * (f[1] - f[2]);
  return {l / 100.0, (a + 128.0) / 255.0, (bb + 128.0) / 255.0};
}

namespace {

std::array<double, 3> lab_to_linear(double l, double a, double bb) {
  const double fy = (l + 16.0) / 116.0;
  const double xyz[3] = {kWhite[0] * lab_f_inv(fy + a / 500.0), kWhite[1] * lab_f_inv(fy),
                         kWhite[2] * lab_f_inv(fy - bb / 200.0)};
  const Mat3& m = xyz_to_rgb();
  std::array<double, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = m[i][0] * xyz[0] + m[i][1] * xyz[1] + m[i][2] * xyz[2];
  return out;
}

bool in_gamut(const std::array<double, 3>& lin) {
  constexpr double kTol = 1e-9;
  for (double v : lin)
    if (v < -kTol || v > 1.0 + kTol) return false;
  return true;
}

// Within half an 8-bit level of the cube once encoded; such colours only left
// the gamut through rounding and are clamped instead of desaturated.
bool near_gamut(const std::array<double, 3>& lin) {
  constexpr double kMargin = 0.5 / 255.0;
  for (double v : lin) {
    const double e = v < 0.0 ? -linear_to_srgb(-v) : linear_to_srgb(v);
    if (e < -kMargin || e > 1.0 + kMargin) return false;
  }
  return true;
}

}  // namespace

void lab_to_rgb(const Lab& lab, double& r, double& g, double& b) {
  const double l = lab.l * 100.0, a = lab.a * 255.0 - 128.0, bb = lab.b * 255.0 - 128.0;
  std::array<double, 3> lin = lab_to_linear(l, a, bb);
  if (!in_gamut(lin) && !near_gamut(lin)) {
    // Pull chroma towards neutral at constant lightness until representable.
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 40; ++i) {
      const double mid = 0.5 * (lo + hi);
      (in_gamut(lab_to_linear(l, a * mid, bb * mid)) ? lo : hi) = mid;
    }
    lin = lab_to_linear(l, a * lo, bb * lo);
  }
  double out[3];
  for (int i = 0; i < 3; ++i) out[i] = std::clamp(linear_to_srgb(std::clamp(lin[i], 0.0, 1.0)), 0.0, 1.0);
  r = out[0];
  g = out[1];
  b = out[2];
}

Image rgb_to_lab(const Image& rgb) {
  if (rgb.channels != 3) throw DimensionError("channels", "rgb_to_lab expects 3 channels, got " + std::to_string(rgb.channels));
  Image out = Image::zeros(3, rgb.height, rgb.width);
  const std::int64_t n = rgb.plane();
  for (std::int64_t i = 0; i < n; ++i) {
    const Lab lab = rgb_to_lab(rgb.channel(0)[i], rgb.channel(1)[i], rgb.channel(2)[i]);
    out.channel(0)[i] = static_cast<float>(lab.l);
    out.channel(1)[i] = static_cast<float>(lab.a);
    out.channel(2)[i] = static_cast<float>(lab.b);
  }
  return out;
}

Image lab_to_rgb(const Image& lab) {
  if (lab.channels != 3) throw DimensionError("channels", "lab_to_rgb expects 3 channels, got " + std::to_string(lab.channels));
  Image out = Image::zeros(3, lab.height, lab.width);
  const std::int64_t n = lab.plane();
  for (std::int64_t i = 0; i < n; ++i) {
    double r, g, b;
    lab_to_rgb({lab.channel(0)[i], lab.channel(1)[i], lab.channel(2)[i]}, r, g, b);
    out.channel(0)[i] = static_cast<float>(r);
    out.channel(1)[i] = static_cast<float>(g);
    out.channel(2)[i] = static_cast<float>(b);
  }
  return out;
}

Image rgb_to_luma(const Image& rgb) {
  Image lab = rgb_to_lab(rgb);
  lab.data.resize(static_cast<std::size_t>(lab.plane()));
  lab.channels = 1;
  return lab;
}

Image from_rgb8(const Rgb8Frame& frame) {
  if (static_cast<std::int64_t>(frame.rgb.size()) != frame.height * frame.width * 3) {
    throw DimensionError("channels", "8-bit frame buffer does not match its dimensions");
  }
  Image out = Image::zeros(3, frame.height, frame.width);
  const std::int64_t n = out.plane();
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) out.channel(c)[i] = static_cast<float>(frame.rgb[static_cast<std::size_t>(i * 3 + c)]) / 255.0f;
  return out;
}

Rgb8Frame to_rgb8(const Image& rgb) {
  if (rgb.channels != 3 && rgb.channels != 1) {
    throw DimensionError("channels", "to_rgb8 expects 1 or 3 channels, got " + std::to_string(rgb.channels));
  }
  Rgb8Frame f{rgb.height, rgb.width, std::vector<std::uint8_t>(static_cast<std::size_t>(rgb.plane() * 3))};
  const std::int64_t n = rgb.plane();
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) {
      const float v = rgb.channel(rgb.channels == 3 ? c : 0)[i];
      f.rgb[static_cast<std::size_t>(i * 3 + c)] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
    }
  return f;
}

std::vector<Image> compose_output(const Tensor& luma, const Tensor& chroma) {
  Shape ls = luma.shape(), cs = chroma.shape();
  if (ls.size() == 5 && ls[0] == 1 && ls[1] == 1) ls = {ls[2], ls[3], ls[4]};
  if (cs.size() == 5 && cs[0] == 1) cs = {cs[1], cs[2], cs[3], cs[4]};
  if (ls.size() != 3) throw DimensionError("rank", "luminance must be (T, H, W), got " + shape_to_string(luma.shape()));
  if (cs.size() != 4 || cs[0] != 2) {
    throw DimensionError("channels", "chrominance must be (2, T, H, W), got " + shape_to_string(chroma.shape()));
  }
  static const char* names[] = {"time", "height", "width"};
  for (int i = 0; i < 3; ++i) {
    if (ls[static_cast<std::size_t>(i)] != cs[static_cast<std::size_t>(i) + 1]) {
      throw DimensionError(names[i], "luminance " + shape_to_string(luma.shape()) + " and chrominance " +
                                         shape_to_string(chroma.shape()) + " disagree");
    }
  }
  const std::int64_t t = ls[0], plane = ls[1] * ls[2];
  std::vector<Image> frames;
  frames.reserve(static_cast<std::size_t>(t));
  const float* l = luma.data().data();
  const float* ab = chroma.data().data();
  for (std::int64_t f = 0; f < t; ++f) {
    Image lab = Image::zeros(3, ls[1], ls[2]);
    std::copy_n(l + f * plane, plane, lab.channel(0));
    std::copy_n(ab + f * plane, plane, lab.channel(1));
    std::copy_n(ab + (t + f) * plane, plane, lab.channel(2));
    frames.push_back(lab_to_rgb(lab));
  }
  return frames;
}

}  // namespace remaster
