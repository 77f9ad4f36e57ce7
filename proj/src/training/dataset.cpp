#include "remaster/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "remaster/errors.hpp"
#include "remaster/png_io.hpp"

namespace remaster {

VideoDataset VideoDataset::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  VideoDataset ds;
  auto frames = list_pngs(dir);
  if (!frames.empty()) {
    ds.add_video(dir.filename().string(), std::move(frames));
    return ds;
  }
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_directory()) subdirs.push_back(e.path());
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& d : subdirs) {
    auto files = list_pngs(d);
    if (!files.empty()) ds.add_video(d.filename().string(), std::move(files));
  }
  if (ds.empty()) throw DataError("no PNG frames found under " + dir.string());
  return ds;
}

VideoDataset VideoDataset::synthetic(std::size_t videos, std::int64_t frames, std::int64_t height, std::int64_t width,
                                     std::uint64_t seed) {
  VideoDataset ds;
  for (std::size_t v = 0; v < videos; ++v) {
    ds.add_video("synthetic_" + std::to_string(v), synthetic_video(frames, height, width, Rng::mix(seed, v)));
  }
  return ds;
}

void VideoDataset::add_video(std::string id, std::vector<Image> frames) {
  if (frames.empty()) throw DataError("video " + id + " has no frames");
  videos_.push_back({std::move(id), std::move(frames), {}});
}

void VideoDataset::add_video(std::string id, std::vector<std::filesystem::path> frame_files) {
  if (frame_files.empty()) throw DataError("video " + id + " has no frames");
  videos_.push_back({std::move(id), {}, std::move(frame_files)});
}

std::int64_t VideoDataset::length(std::size_t video) const {
  const Video& v = videos_.at(video);
  return static_cast<std::int64_t>(v.files.empty() ? v.frames.size() : v.files.size());
}

std::vector<std::int64_t> VideoDataset::lengths() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < videos_.size(); ++i) out.push_back(length(i));
  return out;
}

Image VideoDataset::frame(std::size_t video, std::int64_t index) const {
  const Video& v = videos_.at(video);
  if (index < 0 || index >= length(video)) {
    throw DataError("frame " + std::to_string(index) + " out of range for video " + v.id);
  }
  const auto i = static_cast<std::size_t>(index);
  return v.files.empty() ? v.frames[i] : load_png(v.files[i], 3);
}

std::vector<Image> VideoDataset::clip(std::size_t video, std::int64_t start, std::int64_t count) const {
  std::vector<Image> out;
  for (std::int64_t i = 0; i < count; ++i) out.push_back(frame(video, start + i));
  return out;
}

VideoDataset VideoDataset::subset(std::size_t begin, std::size_t end) const {
  if (begin > end || end > videos_.size()) throw DataError("video subset out of range");
  VideoDataset ds;
  ds.videos_.assign(videos_.begin() + static_cast<std::ptrdiff_t>(begin), videos_.begin() + static_cast<std::ptrdiff_t>(end));
  return ds;
}

namespace {

void hsv_to_rgb(double h, double s, double v, float out[3]) {
  h = h - std::floor(h);
  const double k[3] = {5.0, 3.0, 1.0};
  for (int c = 0; c < 3; ++c) {
    const double kk = std::fmod(k[c] + h * 6.0, 6.0);
    out[c] = static_cast<float>(v - v * s * std::max(0.0, std::min({kk, 4.0 - kk, 1.0})));
  }
}

struct Blob {
  double cy, cx, vy, vx, ry, rx;
  double hue, hue_rate, sat, val;
  double freq, phase;
};

}  // namespace

std::vector<Image> synthetic_video(std::int64_t frames, std::int64_t height, std::int64_t width, std::uint64_t seed) {
  if (frames <= 0 || height <= 0 || width <= 0) throw DataError("synthetic video needs positive dimensions");
  Rng rng(seed);
  const double h = static_cast<double>(height), w = static_cast<double>(width), m = std::min(h, w);
  double bg_hue[2] = {rng.uniform(), rng.uniform()};
  const double bg_rate = rng.uniform(-1.0, 1.0) / 600.0;
  const double bg_val[2] = {rng.uniform(0.3, 0.9), rng.uniform(0.3, 0.9)};
  std::vector<Blob> blobs(static_cast<std::size_t>(rng.uniform_int(3, 5)));
  for (auto& b : blobs) {
    b.cy = rng.uniform(0.2, 0.8) * h;
    b.cx = rng.uniform(0.2, 0.8) * w;
    b.vy = rng.uniform(-0.6, 0.6) * m / 100.0;
    b.vx = rng.uniform(-0.6, 0.6) * m / 100.0;
    b.ry = rng.uniform(0.1, 0.25) * m;
    b.rx = rng.uniform(0.1, 0.25) * m;
    b.hue = rng.uniform();
    // Roughly a third to two thirds of the hue circle over 300 frames.
    b.hue_rate = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(1.0, 2.0) / 900.0;
    b.sat = rng.uniform(0.5, 0.9);
    b.val = rng.uniform(0.4, 0.95);
    b.freq = rng.uniform(0.1, 0.4);
    b.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }

  std::vector<Image> out;
  out.reserve(static_cast<std::size_t>(frames));
  for (std::int64_t f = 0; f < frames; ++f) {
    Image img = Image::zeros(3, height, width);
    float top[3], bottom[3];
    hsv_to_rgb(bg_hue[0] + bg_rate * f, 0.4, bg_val[0], top);
    hsv_to_rgb(bg_hue[1] + bg_rate * f, 0.4, bg_val[1], bottom);
    for (std::int64_t y = 0; y < height; ++y) {
      const float t = static_cast<float>(y) / static_cast<float>(std::max<std::int64_t>(1, height - 1));
      for (std::int64_t x = 0; x < width; ++x)
        for (int c = 0; c < 3; ++c) img.at(c, y, x) = top[c] + t * (bottom[c] - top[c]);
    }
    for (auto& b : blobs) {
      float rgb[3];
      hsv_to_rgb(b.hue + b.hue_rate * f, b.sat, b.val, rgb);
      const std::int64_t y0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(b.cy - b.ry));
      const std::int64_t y1 = std::min<std::int64_t>(height - 1, static_cast<std::int64_t>(b.cy + b.ry) + 1);
      const std::int64_t x0 = std::max<std::int64_t>(0, static_cast<std::int64_t>(b.cx - b.rx));
      const std::int64_t x1 = std::min<std::int64_t>(width - 1, static_cast<std::int64_t>(b.cx + b.rx) + 1);
      for (std::int64_t y = y0; y <= y1; ++y)
        for (std::int64_t x = x0; x <= x1; ++x) {
          const double dy = (y - b.cy) / b.ry, dx = (x - b.cx) / b.rx;
          if (dy * dy + dx * dx > 1.0) continue;
          // Stripes give the luminance something to restore.
          const float shade = static_cast<float>(0.85 + 0.15 * std::sin(b.freq * (x + y) + b.phase));
          for (int c = 0; c < 3; ++c) img.at(c, y, x) = std::clamp(rgb[c] * shade, 0.0f, 1.0f);
        }
      b.cy += b.vy;
      b.cx += b.vx;
      if (b.cy < 0 || b.cy > h) b.vy = -b.vy;
      if (b.cx < 0 || b.cx > w) b.vx = -b.vx;
    }
    out.push_back(std::move(img));
  }
  return out;
}

TrainingSample make_sample(const VideoDataset& data, const NoiseBank& bank, const SampleOptions& opt,
                           std::uint64_t seed) {
  if (data.empty()) throw DataError("dataset is empty");
  std::vector<std::size_t> eligible;
  for (std::size_t v = 0; v < data.size(); ++v)
    if (data.length(v) >= opt.clip_length) eligible.push_back(v);
  if (eligible.empty()) throw DataError("no video has at least " + std::to_string(opt.clip_length) + " frames");

  Rng rng(seed);
  const std::size_t video = eligible[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(eligible.size()) - 1))];
  const std::int64_t start = rng.uniform_int(0, data.length(video) - opt.clip_length);
  const auto picks = sample_references(data.lengths(), video, start, opt.clip_length, rng, opt.max_references);

  RecipeOptions ro;
  ro.crop_size = opt.crop_size;
  ro.frames = opt.clip_length;
  ro.references = picks.size();
  ro.bank_size = bank.size();
  ro.table = opt.table;
  const DegradeRecipe recipe = draw_recipe(rng.next_u64(), ro);

  std::vector<Image> refs;
  for (const auto& p : picks) refs.push_back(data.frame(p.video, p.frame));
  return apply_recipe(data.clip(video, start, opt.clip_length), refs, bank, recipe);
}

}  // namespace remaster
