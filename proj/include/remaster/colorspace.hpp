#pragma once

#include <cstdint>
#include <vector>

#include "remaster/image.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

/// Network-facing Lab: L in [0, 1] is CIE L*/100, a and b are (v + 128) / 255.
/// CIE Lab under D65 with the sRGB transfer curve.
struct Lab {
  double l, a, b;
};

Lab rgb_to_lab(double r, double g, double b);
/// Colours outside the sRGB gamut keep their lightness and lose chroma until
/// representable; lightness outside [0, 1] is then clamped. Colours within
/// half an 8-bit level of the gamut are clamped per channel instead.
void lab_to_rgb(const Lab& lab, double& r, double& g, double& b);

/// 3-channel RGB in [0, 1] to 3-channel normalized Lab, and back (clamped).
Image rgb_to_lab(const Image& rgb);
Image lab_to_rgb(const Image& lab);

/// The L channel of rgb_to_lab as a single-channel image.
Image rgb_to_luma(const Image& rgb);

/// 8-bit interleaved RGB frame.
struct Rgb8Frame {
  std::int64_t height = 0, width = 0;
  std::vector<std::uint8_t> rgb;  // H * W * 3

  bool operator==(const Rgb8Frame&) const = default;
};

Image from_rgb8(const Rgb8Frame& frame);
/// Rounds to nearest after clamping to [0, 1].
Rgb8Frame to_rgb8(const Image& rgb);

/// Recombines restored luminance (T, H, W) and chrominance (2, T, H, W), both
/// in [0, 1], into T RGB frames. Rank-5 tensors with a batch of one are also
/// accepted.
std::vector<Image> compose_output(const Tensor& luma, const Tensor& chroma);

}  // namespace remaster
