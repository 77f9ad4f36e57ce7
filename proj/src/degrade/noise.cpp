#include <algorithm>
#include <cmath>

#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"
#include "remaster/png_io.hpp"

namespace remaster {

const char* noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kLoaded: return "loaded";
    case NoiseKind::kFractal: return "fractal";
    case NoiseKind::kGrain: return "grain";
    case NoiseKind::kScratch: return "scratch";
    case NoiseKind::kDust: return "dust";
  }
  return "unknown";
}

namespace {

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise: 4 octaves, persistence 0.5, then a sign-preserving power
// curve standing in for the tone-curve edits used on generated damage.
Image fractal(std::int64_t h, std::int64_t w, Rng& rng) {
  Image out = Image::zeros(1, h, w);
  const double base_cell = static_cast<double>(std::max(h, w)) / 4.0;
  double amp = 1.0, total = 0.0;
  for (int octave = 0; octave < 4; ++octave) {
    const double cell = base_cell / std::pow(2.0, octave);
    const auto gh = static_cast<std::int64_t>(std::ceil(static_cast<double>(h) / cell)) + 2;
    const auto gw = static_cast<std::int64_t>(std::ceil(static_cast<double>(w) / cell)) + 2;
    std::vector<double> grid(static_cast<std::size_t>(gh * gw));
    for (auto& g : grid) g = rng.uniform(-1.0, 1.0);
    for (std::int64_t y = 0; y < h; ++y) {
      const double gy = static_cast<double>(y) / cell;
      const auto y0 = static_cast<std::int64_t>(gy);
      const double ty = smooth(gy - static_cast<double>(y0));
      for (std::int64_t x = 0; x < w; ++x) {
        const double gx = static_cast<double>(x) / cell;
        const auto x0 = static_cast<std::int64_t>(gx);
        const double tx = smooth(gx - static_cast<double>(x0));
        auto g = [&](std::int64_t yy, std::int64_t xx) { return grid[static_cast<std::size_t>(yy * gw + xx)]; };
        const double top = g(y0, x0) * (1 - tx) + g(y0, x0 + 1) * tx;
        const double bottom = g(y0 + 1, x0) * (1 - tx) + g(y0 + 1, x0 + 1) * tx;
        out.at(0, y, x) += static_cast<float>(amp * (top * (1 - ty) + bottom * ty));
      }
    }
    total += amp;
    amp *= 0.5;
  }
  const double gamma = rng.uniform(0.5, 2.0);
  for (auto& v : out.data) {
    const double n = v / total;
    v = static_cast<float>(std::copysign(std::pow(std::fabs(n), gamma), n));
  }
  return out;
}

Image grain(std::int64_t h, std::int64_t w, Rng& rng) {
  Image raw = Image::zeros(1, h, w);
  for (auto& v : raw.data) v = static_cast<float>(rng.normal(0.0, 0.5));
  // Light [1 2 1] smoothing clumps the grain; the factor restores its spread.
  Image out = raw;
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      double s = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const double k = (dy == 0 ? 2.0 : 1.0) * (dx == 0 ? 2.0 : 1.0) / 16.0;
          s += k * raw.at(0, std::clamp<std::int64_t>(y + dy, 0, h - 1), std::clamp<std::int64_t>(x + dx, 0, w - 1));
        }
      out.at(0, y, x) = static_cast<float>(std::clamp(s * 1.6, -1.0, 1.0));
    }
  return out;
}

void splat(Image& img, std::int64_t y, double fx, double sigma, double value) {
  const auto lo = static_cast<std::int64_t>(std::floor(fx - 3 * sigma));
  const auto hi = static_cast<std::int64_t>(std::ceil(fx + 3 * sigma));
  for (std::int64_t x = std::max<std::int64_t>(lo, 0); x <= std::min(hi, img.width - 1); ++x) {
    const double d = static_cast<double>(x) - fx;
    const double v = value * std::exp(-d * d / (2 * sigma * sigma));
    float& p = img.at(0, y, x);
    if (std::fabs(v) > std::fabs(p)) p = static_cast<float>(v);
  }
}

// Thin, nearly vertical streaks spanning most of the frame.
Image scratch(std::int64_t h, std::int64_t w, Rng& rng) {
  Image out = Image::zeros(1, h, w);
  const std::int64_t count = rng.uniform_int(1, 3);
  for (std::int64_t i = 0; i < count; ++i) {
    double x = rng.uniform(0.05, 0.95) * static_cast<double>(w);
    const double slope = rng.uniform(-0.01, 0.01);
    const double sigma = rng.uniform(0.4, 1.0);
    const double value = (rng.bernoulli(0.5) ? 1.0 : -1.0) * rng.uniform(0.5, 1.0);
    const auto y0 = static_cast<std::int64_t>(rng.uniform(0.0, 0.3) * static_cast<double>(h));
    const auto y1 = static_cast<std::int64_t>(rng.uniform(0.7, 1.0) * static_cast<double>(h));
    for (std::int64_t y = y0; y < y1; ++y) {
      splat(out, y, x, sigma, value * rng.uniform(0.7, 1.0));
      x += slope;
    }
  }
  return out;
}

// Sparse soft specks, mostly dark with some bright.
Image dust(std::int64_t h, std::int64_t w, Rng& rng) {
  Image out = Image::zeros(1, h, w);
  const double area = static_cast<double>(h * w) / 65536.0;
  const auto count = static_cast<std::int64_t>(std::ceil(rng.uniform(10.0, 40.0) * area));
  const double size_scale = std::sqrt(area);
  for (std::int64_t i = 0; i < count; ++i) {
    const double cy = rng.uniform(0, static_cast<double>(h)), cx = rng.uniform(0, static_cast<double>(w));
    const double ry = rng.uniform(0.5, 2.5) * size_scale, rx = rng.uniform(0.5, 2.5) * size_scale;
    const double value = (rng.bernoulli(0.7) ? -1.0 : 1.0) * rng.uniform(0.5, 1.0);
    const auto y0 = static_cast<std::int64_t>(std::floor(cy - 3 * ry)), y1 = static_cast<std::int64_t>(std::ceil(cy + 3 * ry));
    const auto x0 = static_cast<std::int64_t>(std::floor(cx - 3 * rx)), x1 = static_cast<std::int64_t>(std::ceil(cx + 3 * rx));
    for (std::int64_t y = std::max<std::int64_t>(y0, 0); y <= std::min(y1, h - 1); ++y)
      for (std::int64_t x = std::max<std::int64_t>(x0, 0); x <= std::min(x1, w - 1); ++x) {
        const double dy = (static_cast<double>(y) - cy) / ry, dx = (static_cast<double>(x) - cx) / rx;
        const double v = value * std::exp(-0.5 * (dy * dy + dx * dx));
        float& p = out.at(0, y, x);
        if (std::fabs(v) > 0.02 && std::fabs(v) > std::fabs(p)) p = static_cast<float>(v);
      }
  }
  return out;
}

}  // namespace

Image generate_noise(NoiseKind kind, std::int64_t height, std::int64_t width, std::uint64_t seed) {
  if (height < 64) throw DimensionError("height", "noise images must be at least 64 pixels high");
  if (width < 64) throw DimensionError("width", "noise images must be at least 64 pixels wide");
  Rng rng(Rng::mix(seed, static_cast<std::uint64_t>(kind)));
  switch (kind) {
    case NoiseKind::kFractal: return fractal(height, width, rng);
    case NoiseKind::kGrain: return grain(height, width, rng);
    case NoiseKind::kScratch: return scratch(height, width, rng);
    case NoiseKind::kDust: return dust(height, width, rng);
    case NoiseKind::kLoaded: break;
  }
  throw DataError("loaded noise cannot be generated");
}

void NoiseBank::add(Image deviation, NoiseKind kind, std::string source) {
  if (deviation.channels != 1) throw DimensionError("channels", "noise images must be single-channel");
  if (deviation.empty()) throw DimensionError("height", "noise image is empty");
  entries_.push_back({std::move(deviation), kind, std::move(source)});
}

std::size_t NoiseBank::load_directory(const std::filesystem::path& dir) {
  const auto files = list_pngs(dir);
  for (const auto& f : files) {
    Image img = load_png(f, 1);
    for (auto& v : img.data) v -= 0.5f;
    add(std::move(img), NoiseKind::kLoaded, f.filename().string());
  }
  return files.size();
}

void NoiseBank::add_procedural(std::size_t count, std::int64_t size, std::uint64_t seed) {
  static constexpr NoiseKind kinds[] = {NoiseKind::kFractal, NoiseKind::kGrain, NoiseKind::kScratch, NoiseKind::kDust};
  for (std::size_t i = 0; i < count; ++i) {
    const NoiseKind kind = kinds[i % 4];
    Image img = generate_noise(kind, size, size, Rng::mix(seed, i));
    for (auto& v : img.data) v *= 0.5f;
    add(std::move(img), kind, noise_kind_name(kind));
  }
}

}  // namespace remaster
