#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "remaster/image.hpp"
#include "remaster/rng.hpp"
#include "remaster/tensor.hpp"

namespace remaster {

// ---------------------------------------------------------------------------
// Pixel-level degradations

/// Block-DCT round trip at an IJG-style quality (1..100): 8x8 DCT, quantise
/// with the standard luminance (and, for RGB, chrominance) tables, dequantise.
Image jpeg_simulate(const Image& img, int quality);

/// Bicubic downsample by `factor` and bicubic upsample back to the original size.
Image blur_bicubic(const Image& img, double factor);

/// v * factor.
void adjust_brightness(Image& img, double factor);
/// (v - 0.5) * factor + 0.5.
void adjust_contrast(Image& img, double factor);
/// Blend an RGB image towards its luminance: grey + factor * (rgb - grey).
void adjust_saturation(Image& img, double factor);
/// Adds N(0, stddev^2) per pixel from a seeded stream.
void add_gaussian_noise(Image& img, double stddev, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Film-damage noise

enum class NoiseKind { kLoaded, kFractal, kGrain, kScratch, kDust };
const char* noise_kind_name(NoiseKind kind);

/// Procedural damage pattern in [-1, 1]; deterministic per seed. Height and
/// width must be at least 64.
Image generate_noise(NoiseKind kind, std::int64_t height, std::int64_t width, std::uint64_t seed);

/// Read-only collection of single-channel additive deviation maps in
/// [-0.5, 0.5] (0 = no change).
class NoiseBank {
 public:
  struct Entry {
    Image image;
    NoiseKind kind;
    std::string source;
  };

  void add(Image deviation, NoiseKind kind, std::string source = {});
  /// Loads every PNG in `dir` as greyscale; mid-grey maps to zero deviation.
  /// Returns the number of images added.
  std::size_t load_directory(const std::filesystem::path& dir);
  /// Adds `count` procedural images cycling fractal, grain, scratch, dust,
  /// scaled by 0.5 into the bank's deviation range.
  void add_procedural(std::size_t count, std::int64_t size, std::uint64_t seed);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Entry& at(std::size_t i) const { return entries_.at(i); }

 private:
  std::vector<Entry> entries_;
};

// ---------------------------------------------------------------------------
// Recipes

/// Augmentation probabilities and ranges. Pixel ranges are given for a
/// 256-pixel crop and scale with the configured crop size.
struct AugmentTable {
  double flip_p = 0.5;
  double scale_lo = 256, scale_hi = 400;
  double rotation_deg = 5.0;
  double brightness_p = 0.2, brightness_lo = 0.8, brightness_hi = 1.2;
  double contrast_p = 0.2, contrast_lo = 0.9, contrast_hi = 1.0;
  double jpeg_p = 0.9, jpeg_lo = 15, jpeg_hi = 40;
  double noise_p = 0.1, noise_std = 0.04;
  double blur_p = 0.5, blur_lo = 2, blur_hi = 4;
  double x_contrast_p = 1.0 / 3.0, x_contrast_lo = 0.6, x_contrast_hi = 1.0;
  double ref_scale_lo = 256, ref_scale_hi = 320;
  double saturation_p = 0.1, saturation_lo = 0.3, saturation_hi = 1.0;
  // Film-damage layers
  double noise_scale_lo = 256, noise_scale_hi = 720;
  double noise_flip_p = 0.5;
  double noise_rotation_deg = 5.0;
  double amplitude_lo = 0.5, amplitude_hi = 1.5;
  std::int64_t layers_lo = 1, layers_hi = 3;
};

struct NoiseLayerDraw {
  std::int64_t bank_index = 0;
  double edge = 256;
  bool flip_h = false, flip_v = false;
  double rotation = 0;
  double crop_y = 0, crop_x = 0;  // fractional offsets
  double amplitude = 1;
  int sign = 1;

  bool operator==(const NoiseLayerDraw&) const = default;
};

struct ReferenceDraw {
  bool flip = false;
  double edge = 256;
  double crop_y = 0, crop_x = 0;
  bool jpeg = false;
  double jpeg_quality = 40;
  bool noise = false;
  std::uint64_t noise_seed = 0;
  bool saturation = false;
  double saturation_factor = 1;

  bool operator==(const ReferenceDraw&) const = default;
};

/// Complete, replayable description of one training-sample degradation.
struct DegradeRecipe {
  std::uint64_t seed = 0;
  std::int64_t crop_size = 256;
  std::int64_t frames = 5;

  // Applied jointly to input and target.
  bool flip = false;
  double scale_edge = 256;
  double crop_y = 0, crop_x = 0;
  double rotation = 0;
  bool brightness = false;
  double brightness_factor = 1;
  bool contrast = false;
  double contrast_factor = 1;

  // Input only.
  bool jpeg = false;
  double jpeg_quality = 40;
  bool noise = false;
  double noise_std = 0.04;
  std::uint64_t noise_seed = 0;
  bool blur = false;
  double blur_factor = 2;
  bool x_contrast = false;
  double x_contrast_factor = 1;

  bool deteriorate = false;
  std::vector<std::vector<NoiseLayerDraw>> frame_noise;  // per frame

  std::vector<ReferenceDraw> references;

  bool operator==(const DegradeRecipe&) const = default;

  std::string to_json() const;
  static DegradeRecipe from_json(const std::string& text);
};

struct RecipeOptions {
  std::int64_t crop_size = 256;
  std::int64_t frames = 5;
  std::size_t references = 0;
  /// Number of bank images; 0 disables film-damage layers.
  std::size_t bank_size = 0;
  /// Turns joint geometry (flip, rotation, random crop offset) off, e.g. for evaluation.
  bool joint_geometry = true;
  AugmentTable table{};
};

DegradeRecipe draw_recipe(std::uint64_t seed, const RecipeOptions& options);

/// A recipe under which the input is exactly the greyscale of the target.
DegradeRecipe identity_recipe(std::int64_t crop_size, std::int64_t frames, std::size_t references);

// ---------------------------------------------------------------------------
// Samples

struct TrainingSample {
  Tensor x;     // (1, 1, T, S, S) degraded luminance
  Tensor y_l;   // (1, 1, T, S, S)
  Tensor y_ab;  // (1, 2, T, S, S)
  Tensor z;     // (1, 3, N, S, S) RGB references, undefined when N = 0
};

/// Applies a recipe to clean RGB frames and reference images. A crop size of
/// 0 keeps whole frames: joint scaling, rotation and cropping and reference
/// scaling are skipped (evaluation use).
TrainingSample apply_recipe(const std::vector<Image>& clip, const std::vector<Image>& references, const NoiseBank& bank,
                            const DegradeRecipe& recipe);

/// Frame in a multi-video dataset.
struct FrameRef {
  std::size_t video = 0;
  std::int64_t frame = 0;
  bool operator==(const FrameRef&) const = default;
};

/// Count uniform on {0..max_count}; the first reference comes from the clip's
/// own video within `window` frames of the clip, the rest uniformly from
/// every frame of every video.
std::vector<FrameRef> sample_references(const std::vector<std::int64_t>& video_lengths, std::size_t video,
                                        std::int64_t clip_start, std::int64_t clip_length, Rng& rng,
                                        std::int64_t max_count = 6, std::int64_t window = 5);

}  // namespace remaster
