#include <algorithm>
#include <cmath>
#include <string>

#include "remaster/colorspace.hpp"
#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"

namespace remaster {

Image blur_bicubic(const Image& img, double factor) {
  const auto h = std::max<std::int64_t>(1, std::llround(static_cast<double>(img.height) / factor));
  const auto w = std::max<std::int64_t>(1, std::llround(static_cast<double>(img.width) / factor));
  return resize_bicubic(resize_bicubic(img, h, w), img.height, img.width);
}

void adjust_brightness(Image& img, double factor) {
  for (auto& v : img.data) v = static_cast<float>(v * factor);
}

void adjust_contrast(Image& img, double factor) {
  for (auto& v : img.data) v = static_cast<float>((v - 0.5) * factor + 0.5);
}

void adjust_saturation(Image& img, double factor) {
  if (img.channels != 3) throw DimensionError("channels", "saturation needs an RGB image");
  const std::int64_t n = img.plane();
  for (std::int64_t i = 0; i < n; ++i) {
    const double grey = 0.2126 * img.channel(0)[i] + 0.7152 * img.channel(1)[i] + 0.0722 * img.channel(2)[i];
    for (int c = 0; c < 3; ++c) img.channel(c)[i] = static_cast<float>(grey + factor * (img.channel(c)[i] - grey));
  }
}

void add_gaussian_noise(Image& img, double stddev, std::uint64_t seed) {
  Rng rng(seed);
  for (auto& v : img.data) v = static_cast<float>(v + rng.normal(0.0, stddev));
}

namespace {

// Scale, optional rotation about the crop window's centre, crop to size.
// Rotating only a margin-padded window keeps the cost independent of the
// scaled image size.
Image scale_rotate_crop(const Image& img, double edge, double rotation, double fy, double fx, std::int64_t height,
                        std::int64_t width) {
  Image scaled = resize_shortest_edge(img, edge);
  if (rotation == 0.0) return crop_fraction(scaled, fy, fx, height, width);
  const std::int64_t margin = static_cast<std::int64_t>(std::ceil(0.1 * static_cast<double>(std::max(height, width)))) + 2;
  const std::int64_t wh = std::min(scaled.height, height + 2 * margin);
  const std::int64_t ww = std::min(scaled.width, width + 2 * margin);
  // Place the window so that the final crop lands where fy/fx would put it.
  const auto top = static_cast<std::int64_t>(std::floor(fy * static_cast<double>(scaled.height - height + 1)));
  const auto left = static_cast<std::int64_t>(std::floor(fx * static_cast<double>(scaled.width - width + 1)));
  const std::int64_t wt = std::clamp<std::int64_t>(top - (wh - height) / 2, 0, scaled.height - wh);
  const std::int64_t wl = std::clamp<std::int64_t>(left - (ww - width) / 2, 0, scaled.width - ww);
  Image window = rotate(crop(scaled, wt, wl, wh, ww), rotation);
  const std::int64_t ct = std::clamp<std::int64_t>(top - wt, 0, wh - height);
  const std::int64_t cl = std::clamp<std::int64_t>(left - wl, 0, ww - width);
  return crop(window, ct, cl, height, width);
}

Tensor stack(const std::vector<Image>& frames, std::int64_t first_channel, std::int64_t channels) {
  const std::int64_t t = static_cast<std::int64_t>(frames.size());
  const std::int64_t h = frames.front().height, w = frames.front().width, plane = h * w;
  for (const auto& f : frames) {
    if (f.height != h) throw DimensionError("height", "images to stack differ in height");
    if (f.width != w) throw DimensionError("width", "images to stack differ in width");
  }
  std::vector<float> data(static_cast<std::size_t>(channels * t * plane));
  for (std::int64_t c = 0; c < channels; ++c)
    for (std::int64_t f = 0; f < t; ++f)
      std::copy_n(frames[static_cast<std::size_t>(f)].channel(first_channel + c), plane, data.begin() + (c * t + f) * plane);
  return Tensor::from_data({1, channels, t, h, w}, std::move(data));
}

}  // namespace

TrainingSample apply_recipe(const std::vector<Image>& clip, const std::vector<Image>& references, const NoiseBank& bank,
                            const DegradeRecipe& recipe) {
  const std::int64_t size = recipe.crop_size;
  const bool full = size == 0;
  if (!full && size < 16) throw DimensionError("height", "crop size must be at least 16");
  if (static_cast<std::int64_t>(clip.size()) != recipe.frames) {
    throw DataError("recipe expects " + std::to_string(recipe.frames) + " frames, clip has " + std::to_string(clip.size()));
  }
  if (references.size() != recipe.references.size()) {
    throw DataError("recipe expects " + std::to_string(recipe.references.size()) + " references, got " +
                    std::to_string(references.size()));
  }
  if (recipe.deteriorate && bank.empty()) throw DataError("film-damage layers requested but the noise bank is empty");
  for (const auto& f : clip) {
    if (f.channels != 3) throw DimensionError("channels", "clip frames must be RGB");
    if (f.height != clip.front().height) throw DimensionError("height", "clip frames differ in height");
    if (f.width != clip.front().width) throw DimensionError("width", "clip frames differ in width");
  }
  const std::int64_t out_h = full ? clip.front().height : size;
  const std::int64_t out_w = full ? clip.front().width : size;
  const double k = static_cast<double>(full ? std::max(out_h, out_w) : size) / 256.0;

  std::vector<Image> targets, inputs;
  for (std::size_t f = 0; f < clip.size(); ++f) {
    Image y = recipe.flip ? flip_horizontal(clip[f]) : clip[f];
    if (!full) y = scale_rotate_crop(y, recipe.scale_edge * k, recipe.rotation, recipe.crop_y, recipe.crop_x, size, size);
    if (recipe.brightness) adjust_brightness(y, recipe.brightness_factor);
    if (recipe.contrast) adjust_contrast(y, recipe.contrast_factor);
    clamp01(y);
    Image lab = rgb_to_lab(y);

    Image x = Image::zeros(1, out_h, out_w);
    std::copy_n(lab.channel(0), lab.plane(), x.channel(0));
    if (recipe.blur) x = blur_bicubic(x, recipe.blur_factor);
    if (recipe.x_contrast) adjust_contrast(x, recipe.x_contrast_factor);
    if (recipe.jpeg) {
      clamp01(x);
      x = jpeg_simulate(x, static_cast<int>(std::lround(recipe.jpeg_quality)));
    }
    if (recipe.noise) add_gaussian_noise(x, recipe.noise_std, Rng::mix(recipe.noise_seed, f));
    if (recipe.deteriorate && f < recipe.frame_noise.size()) {
      for (const auto& layer : recipe.frame_noise[f]) {
        const auto& entry = bank.at(static_cast<std::size_t>(layer.bank_index) % bank.size());
        Image n = entry.image;
        if (layer.flip_h) n = flip_horizontal(n);
        if (layer.flip_v) n = flip_vertical(n);
        n = scale_rotate_crop(n, layer.edge * k, layer.rotation, layer.crop_y, layer.crop_x, out_h, out_w);
        const double gain = layer.sign * layer.amplitude;
        for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] = static_cast<float>(x.data[i] + gain * n.data[i]);
      }
    }
    clamp01(x);
    inputs.push_back(std::move(x));
    targets.push_back(std::move(lab));
  }

  std::vector<Image> refs;
  for (std::size_t j = 0; j < references.size(); ++j) {
    const ReferenceDraw& d = recipe.references[j];
    if (references[j].channels != 3) throw DimensionError("channels", "reference images must be RGB");
    Image z = d.flip ? flip_horizontal(references[j]) : references[j];
    if (!full) z = scale_rotate_crop(z, d.edge * k, 0.0, d.crop_y, d.crop_x, size, size);
    if (d.jpeg) z = jpeg_simulate(z, static_cast<int>(std::lround(d.jpeg_quality)));
    if (d.noise) add_gaussian_noise(z, recipe.noise_std, d.noise_seed);
    if (d.saturation) adjust_saturation(z, d.saturation_factor);
    clamp01(z);
    refs.push_back(std::move(z));
  }

  TrainingSample s;
  s.x = stack(inputs, 0, 1);
  s.y_l = stack(targets, 0, 1);
  s.y_ab = stack(targets, 1, 2);
  if (!refs.empty()) s.z = stack(refs, 0, 3);
  return s;
}

}  // namespace remaster
