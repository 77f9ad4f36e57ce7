#pragma once

#include <cstdint>
#include <vector>

namespace remaster {

/// Planar float image, channel-major (C, H, W).
struct Image {
  std::int64_t channels = 0;
  std::int64_t height = 0;
  std::int64_t width = 0;
  std::vector<float> data;

  static Image zeros(std::int64_t channels, std::int64_t height, std::int64_t width);
  static Image full(std::int64_t channels, std::int64_t height, std::int64_t width, float value);

  std::int64_t plane() const { return height * width; }
  bool empty() const { return data.empty(); }
  float& at(std::int64_t c, std::int64_t y, std::int64_t x) { return data[static_cast<std::size_t>((c * height + y) * width + x)]; }
  float at(std::int64_t c, std::int64_t y, std::int64_t x) const {
    return data[static_cast<std::size_t>((c * height + y) * width + x)];
  }
  float* channel(std::int64_t c) { return data.data() + c * plane(); }
  const float* channel(std::int64_t c) const { return data.data() + c * plane(); }

  bool operator==(const Image&) const = default;
};

/// Separable bicubic resampling (Keys, a = -0.5) with edge clamping. When
/// shrinking, the kernel is widened by the scale factor so the result is
/// low-passed rather than aliased.
Image resize_bicubic(const Image& img, std::int64_t height, std::int64_t width);

/// Scales so the shorter edge equals `edge` pixels (rounded), keeping aspect.
Image resize_shortest_edge(const Image& img, double edge);

/// Rotation about the image centre by `degrees` (counter-clockwise), bilinear
/// sampling with edge clamping, same output size.
Image rotate(const Image& img, double degrees);

Image flip_horizontal(const Image& img);
Image flip_vertical(const Image& img);
Image crop(const Image& img, std::int64_t top, std::int64_t left, std::int64_t height, std::int64_t width);

/// Crop at fractional offsets in [0, 1] of the available slack.
Image crop_fraction(const Image& img, double fy, double fx, std::int64_t height, std::int64_t width);

void clamp01(Image& img);

}  // namespace remaster
