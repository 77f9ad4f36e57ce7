#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>

#include "doctest.h"
#include "remaster/colorspace.hpp"
#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"
#include "remaster/png_io.hpp"
#include "support/stats.hpp"

using namespace remaster;
using remaster::test::ks_p_value;
using remaster::test::ks_uniform;

namespace {

Image gradient_rgb(std::int64_t h, std::int64_t w, std::uint64_t seed) {
  Rng rng(seed);
  const double a = rng.uniform(), b = rng.uniform(), c = rng.uniform();
  Image img = Image::zeros(3, h, w);
  for (std::int64_t y = 0; y < h; ++y)
    for (std::int64_t x = 0; x < w; ++x) {
      img.at(0, y, x) = static_cast<float>(0.5 + 0.4 * std::sin(a * 6 + 0.11 * x + 0.05 * y));
      img.at(1, y, x) = static_cast<float>(0.5 + 0.4 * std::cos(b * 6 + 0.07 * y));
      img.at(2, y, x) = static_cast<float>(0.5 + 0.4 * std::sin(c * 6 + 0.03 * (x + y)));
    }
  return img;
}

Image checkerboard_rgb(std::int64_t size, std::int64_t square) {
  Image img = Image::zeros(3, size, size);
  for (std::int64_t y = 0; y < size; ++y)
    for (std::int64_t x = 0; x < size; ++x) {
      const float v = ((y / square + x / square) % 2) ? 0.9f : 0.1f;
      for (int c = 0; c < 3; ++c) img.at(c, y, x) = v;
    }
  return img;
}

std::vector<Image> clip_of(std::int64_t frames, std::int64_t h, std::int64_t w, std::uint64_t seed) {
  std::vector<Image> clip;
  for (std::int64_t f = 0; f < frames; ++f) clip.push_back(gradient_rgb(h, w, seed + static_cast<std::uint64_t>(f)));
  return clip;
}

double laplacian_variance(const Tensor& x) {
  const auto& s = x.shape();
  const std::int64_t t = s[2], h = s[3], w = s[4];
  std::vector<double> vals;
  for (std::int64_t f = 0; f < t; ++f)
    for (std::int64_t y = 1; y + 1 < h; ++y)
      for (std::int64_t xx = 1; xx + 1 < w; ++xx) {
        auto at = [&](std::int64_t yy, std::int64_t xc) { return static_cast<double>(x.data()[(f * h + yy) * w + xc]); };
        vals.push_back(4 * at(y, xx) - at(y - 1, xx) - at(y + 1, xx) - at(y, xx - 1) - at(y, xx + 1));
      }
  const double mean = std::accumulate(vals.begin(), vals.end(), 0.0) / static_cast<double>(vals.size());
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  return var / static_cast<double>(vals.size());
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::fabs(double(a.data()[i]) - double(b.data()[i])));
  return m;
}

bool same(const Tensor& a, const Tensor& b) {
  return a.shape() == b.shape() && std::equal(a.data().begin(), a.data().end(), b.data().begin());
}

NoiseBank small_bank() {
  NoiseBank bank;
  bank.add_procedural(8, 96, 11);
  return bank;
}

}  // namespace

TEST_CASE("noise generators are deterministic per seed and bounded") {
  for (auto kind : {NoiseKind::kFractal, NoiseKind::kGrain, NoiseKind::kScratch, NoiseKind::kDust}) {
    CAPTURE(noise_kind_name(kind));
    const Image a = generate_noise(kind, 96, 128, 5);
    const Image b = generate_noise(kind, 96, 128, 5);
    const Image c = generate_noise(kind, 96, 128, 6);
    CHECK(a == b);
    CHECK_FALSE(a == c);
    CHECK(a.height == 96);
    CHECK(a.width == 128);
    for (float v : a.data) REQUIRE((v >= -1.0f && v <= 1.0f));
  }
  CHECK_THROWS_AS(generate_noise(NoiseKind::kGrain, 32, 128, 1), DimensionError);
  CHECK_THROWS_AS(generate_noise(NoiseKind::kLoaded, 64, 64, 1), std::exception);
}

TEST_CASE("grain is zero-mean over many seeds") {
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Image g = generate_noise(NoiseKind::kGrain, 256, 256, seed);
    const double mean = std::accumulate(g.data.begin(), g.data.end(), 0.0) / static_cast<double>(g.data.size());
    CHECK(std::fabs(mean) < 0.02);
    total += std::fabs(mean);
  }
  CHECK(total / 100.0 < 0.02);
}

TEST_CASE("scratches concentrate in a few columns") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Image s = generate_noise(NoiseKind::kScratch, 256, 256, seed);
    std::vector<double> column(256, 0.0);
    for (std::int64_t y = 0; y < 256; ++y)
      for (std::int64_t x = 0; x < 256; ++x) column[static_cast<std::size_t>(x)] += std::fabs(s.at(0, y, x));
    const double total = std::accumulate(column.begin(), column.end(), 0.0);
    REQUIRE(total > 0.0);
    std::sort(column.rbegin(), column.rend());
    const double top = std::accumulate(column.begin(), column.begin() + 25, 0.0);
    CAPTURE(seed);
    CHECK(top / total >= 0.9);
  }
}

TEST_CASE("noise bank maps procedural patterns into the deviation range") {
  NoiseBank bank;
  CHECK(bank.empty());
  bank.add_procedural(6, 64, 3);
  REQUIRE(bank.size() == 6);
  CHECK(bank.at(0).kind == NoiseKind::kFractal);
  CHECK(bank.at(3).kind == NoiseKind::kDust);
  CHECK(bank.at(4).kind == NoiseKind::kFractal);
  for (std::size_t i = 0; i < bank.size(); ++i)
    for (float v : bank.at(i).image.data) REQUIRE((v >= -0.5f && v <= 0.5f));
}

TEST_CASE("identity recipe gives the greyscale of the target") {
  const auto clip = clip_of(5, 40, 48, 1);
  const std::vector<Image> refs{gradient_rgb(40, 48, 9)};
  const DegradeRecipe r = identity_recipe(32, 5, 1);
  const TrainingSample s = apply_recipe(clip, refs, NoiseBank{}, r);
  CHECK(s.x.shape() == Shape{1, 1, 5, 32, 32});
  CHECK(s.y_l.shape() == Shape{1, 1, 5, 32, 32});
  CHECK(s.y_ab.shape() == Shape{1, 2, 5, 32, 32});
  CHECK(s.z.shape() == Shape{1, 3, 1, 32, 32});
  CHECK(same(s.x, s.y_l));

  // References are only scaled and centre-cropped.
  const Image expected = crop_fraction(resize_shortest_edge(refs[0], 32.0), 0.5, 0.5, 32, 32);
  for (int c = 0; c < 3; ++c)
    for (std::int64_t i = 0; i < 32 * 32; ++i) REQUIRE(s.z.data()[c * 1024 + i] == doctest::Approx(expected.channel(c)[i]).epsilon(1e-6));

  // The target is the Lab conversion of the scaled, cropped clean frame.
  const Image lab = rgb_to_lab(crop_fraction(resize_shortest_edge(clip[2], 32.0), 0.5, 0.5, 32, 32));
  for (std::int64_t i = 0; i < 1024; ++i) {
    REQUIRE(s.y_l.data()[2 * 1024 + i] == doctest::Approx(lab.channel(0)[i]).epsilon(1e-6));
    REQUIRE(s.y_ab.data()[(5 + 2) * 1024 + i] == doctest::Approx(lab.channel(2)[i]).epsilon(1e-6));
  }
}

TEST_CASE("no references leaves z undefined") {
  const TrainingSample s = apply_recipe(clip_of(5, 32, 32, 2), {}, NoiseBank{}, identity_recipe(32, 5, 0));
  CHECK_FALSE(s.z.defined());
}

TEST_CASE("blur lowers high-frequency energy of a checkerboard") {
  const std::vector<Image> clip(5, checkerboard_rgb(64, 4));
  DegradeRecipe sharp = identity_recipe(64, 5, 0);
  DegradeRecipe blurred = sharp;
  blurred.blur = true;
  blurred.blur_factor = 4.0;
  const double v_sharp = laplacian_variance(apply_recipe(clip, {}, NoiseBank{}, sharp).x);
  const double v_blur = laplacian_variance(apply_recipe(clip, {}, NoiseBank{}, blurred).x);
  CHECK(v_blur < v_sharp);
  CHECK(v_blur < 0.5 * v_sharp);
}

TEST_CASE("joint rotation keeps input and target aligned") {
  for (double angle : {-5.0, -2.5, 3.0, 5.0}) {
    DegradeRecipe r = identity_recipe(32, 5, 0);
    r.rotation = angle;
    r.flip = true;
    r.scale_edge = 300;
    r.crop_y = 0.2;
    r.crop_x = 0.7;
    const TrainingSample s = apply_recipe(clip_of(5, 48, 64, 3), {}, NoiseBank{}, r);
    double ssd = 0.0;
    for (std::size_t i = 0; i < s.x.data().size(); ++i) {
      const double d = s.x.data()[i] - s.y_l.data()[i];
      ssd += d * d;
    }
    CHECK(ssd < 1e-6);
  }
}

TEST_CASE("rotation actually rotates the target") {
  DegradeRecipe a = identity_recipe(32, 5, 0), b = a;
  b.rotation = 5.0;
  const auto clip = clip_of(5, 48, 48, 4);
  CHECK(max_abs_diff(apply_recipe(clip, {}, NoiseBank{}, a).y_l, apply_recipe(clip, {}, NoiseBank{}, b).y_l) > 1e-3);
}

TEST_CASE("transform probabilities match the augmentation table") {
  constexpr int kDraws = 10000;
  RecipeOptions opt;
  opt.references = 1;
  opt.bank_size = 10;
  const AugmentTable t = opt.table;

  struct Counter {
    const char* name;
    double p;
    std::function<bool(const DegradeRecipe&)> fired;
    int hits = 0;
  };
  std::vector<Counter> counters{
      {"flip", t.flip_p, [](const DegradeRecipe& r) { return r.flip; }},
      {"brightness", t.brightness_p, [](const DegradeRecipe& r) { return r.brightness; }},
      {"contrast", t.contrast_p, [](const DegradeRecipe& r) { return r.contrast; }},
      {"jpeg", t.jpeg_p, [](const DegradeRecipe& r) { return r.jpeg; }},
      {"noise", t.noise_p, [](const DegradeRecipe& r) { return r.noise; }},
      {"blur", t.blur_p, [](const DegradeRecipe& r) { return r.blur; }},
      {"x_contrast", t.x_contrast_p, [](const DegradeRecipe& r) { return r.x_contrast; }},
      {"ref flip", t.flip_p, [](const DegradeRecipe& r) { return r.references[0].flip; }},
      {"ref jpeg", t.jpeg_p, [](const DegradeRecipe& r) { return r.references[0].jpeg; }},
      {"ref noise", t.noise_p, [](const DegradeRecipe& r) { return r.references[0].noise; }},
      {"ref saturation", t.saturation_p, [](const DegradeRecipe& r) { return r.references[0].saturation; }},
      {"layer flip h", t.noise_flip_p, [](const DegradeRecipe& r) { return r.frame_noise[0][0].flip_h; }},
      {"layer flip v", t.noise_flip_p, [](const DegradeRecipe& r) { return r.frame_noise[0][0].flip_v; }},
      {"layer adds", 0.5, [](const DegradeRecipe& r) { return r.frame_noise[0][0].sign > 0; }},
  };

  struct Range {
    const char* name;
    double lo, hi;
    std::function<double(const DegradeRecipe&)> value;
    std::vector<double> samples;
  };
  std::vector<Range> ranges{
      {"scale", t.scale_lo, t.scale_hi, [](const DegradeRecipe& r) { return r.scale_edge; }},
      {"rotation", -t.rotation_deg, t.rotation_deg, [](const DegradeRecipe& r) { return r.rotation; }},
      {"brightness", t.brightness_lo, t.brightness_hi, [](const DegradeRecipe& r) { return r.brightness_factor; }},
      {"contrast", t.contrast_lo, t.contrast_hi, [](const DegradeRecipe& r) { return r.contrast_factor; }},
      {"jpeg quality", t.jpeg_lo, t.jpeg_hi, [](const DegradeRecipe& r) { return r.jpeg_quality; }},
      {"blur", t.blur_lo, t.blur_hi, [](const DegradeRecipe& r) { return r.blur_factor; }},
      {"x contrast", t.x_contrast_lo, t.x_contrast_hi, [](const DegradeRecipe& r) { return r.x_contrast_factor; }},
      {"crop y", 0.0, 1.0, [](const DegradeRecipe& r) { return r.crop_y; }},
      {"ref scale", t.ref_scale_lo, t.ref_scale_hi, [](const DegradeRecipe& r) { return r.references[0].edge; }},
      {"ref jpeg quality", t.jpeg_lo, t.jpeg_hi, [](const DegradeRecipe& r) { return r.references[0].jpeg_quality; }},
      {"ref saturation", t.saturation_lo, t.saturation_hi,
       [](const DegradeRecipe& r) { return r.references[0].saturation_factor; }},
      {"layer scale", t.noise_scale_lo, t.noise_scale_hi, [](const DegradeRecipe& r) { return r.frame_noise[0][0].edge; }},
      {"layer rotation", -t.noise_rotation_deg, t.noise_rotation_deg,
       [](const DegradeRecipe& r) { return r.frame_noise[0][0].rotation; }},
      {"layer amplitude", t.amplitude_lo, t.amplitude_hi, [](const DegradeRecipe& r) { return r.frame_noise[0][0].amplitude; }},
  };

  std::vector<int> layer_counts(4, 0);
  for (int i = 0; i < kDraws; ++i) {
    const DegradeRecipe r = draw_recipe(static_cast<std::uint64_t>(i), opt);
    for (auto& c : counters) c.hits += c.fired(r) ? 1 : 0;
    for (auto& g : ranges) g.samples.push_back(g.value(r));
    ++layer_counts[std::min<std::size_t>(3, r.frame_noise[0].size())];
  }
  for (const auto& c : counters) {
    const std::string name = c.name;
    CAPTURE(name);
    CHECK(std::fabs(c.hits / double(kDraws) - c.p) <= 0.02);
  }
  for (const auto& g : ranges) {
    const std::string name = g.name;
    CAPTURE(name);
    // alpha = 0.01 over the whole family of ranges.
    const double p = ks_p_value(ks_uniform(g.samples, g.lo, g.hi), g.samples.size());
    CAPTURE(p);
    CHECK(p > 0.01 / static_cast<double>(ranges.size()));
  }
  CHECK(layer_counts[0] == 0);
  for (int n = 1; n <= 3; ++n) CHECK(std::fabs(layer_counts[static_cast<std::size_t>(n)] / double(kDraws) - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("recipes are deterministic and survive a JSON round trip") {
  RecipeOptions opt;
  opt.references = 3;
  opt.bank_size = 5;
  opt.crop_size = 32;
  const DegradeRecipe a = draw_recipe(77, opt);
  CHECK(a == draw_recipe(77, opt));
  CHECK_FALSE(a == draw_recipe(78, opt));
  const DegradeRecipe back = DegradeRecipe::from_json(a.to_json());
  CHECK(back == a);

  const NoiseBank bank = small_bank();
  const auto clip = clip_of(5, 40, 40, 5);
  const std::vector<Image> refs{gradient_rgb(40, 40, 6), gradient_rgb(48, 40, 7), gradient_rgb(40, 56, 8)};
  const TrainingSample s1 = apply_recipe(clip, refs, bank, a);
  const TrainingSample s2 = apply_recipe(clip, refs, bank, back);
  CHECK(same(s1.x, s2.x));
  CHECK(same(s1.y_ab, s2.y_ab));
  CHECK(same(s1.z, s2.z));

  CHECK_THROWS_AS(DegradeRecipe::from_json("{not json"), DataError);
  CHECK_THROWS_AS(DegradeRecipe::from_json(R"({"schema": 2})"), DataError);
  CHECK_THROWS_AS(DegradeRecipe::from_json(R"({"schema": 1, "seed": 3})"), DataError);
}

TEST_CASE("evaluation recipes keep geometry fixed") {
  RecipeOptions opt;
  opt.joint_geometry = false;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const DegradeRecipe r = draw_recipe(seed, opt);
    CHECK_FALSE(r.flip);
    CHECK(r.rotation == 0.0);
    CHECK(r.crop_y == 0.5);
    CHECK(r.crop_x == 0.5);
  }
}

TEST_CASE("deterioration never touches the targets and inputs stay in range") {
  RecipeOptions opt;
  opt.crop_size = 32;
  opt.references = 2;
  opt.bank_size = 8;
  const NoiseBank bank = small_bank();
  const auto clip = clip_of(5, 40, 44, 9);
  const std::vector<Image> refs{gradient_rgb(36, 40, 1), gradient_rgb(40, 40, 2)};
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    DegradeRecipe r = draw_recipe(seed, opt);
    r.noise = true;  // exercise every path
    const TrainingSample with = apply_recipe(clip, refs, bank, r);
    DegradeRecipe clean = r;
    clean.deteriorate = false;
    clean.frame_noise.clear();
    clean.jpeg = clean.noise = clean.blur = clean.x_contrast = false;
    const TrainingSample without = apply_recipe(clip, refs, bank, clean);
    CHECK(same(with.y_l, without.y_l));
    CHECK(same(with.y_ab, without.y_ab));
    CHECK(same(without.x, without.y_l));
    for (float v : with.x.data()) REQUIRE((v >= 0.0f && v <= 1.0f));
    for (float v : with.z.data()) REQUIRE((v >= 0.0f && v <= 1.0f));
  }
}

TEST_CASE("damage layers differ from frame to frame") {
  RecipeOptions opt;
  opt.crop_size = 32;
  opt.bank_size = 8;
  DegradeRecipe r = draw_recipe(4, opt);
  r.jpeg = r.noise = r.blur = r.x_contrast = r.brightness = r.contrast = false;
  const std::vector<Image> clip(5, gradient_rgb(40, 40, 3));
  const TrainingSample s = apply_recipe(clip, {}, small_bank(), r);
  const std::int64_t plane = 32 * 32;
  int differing = 0;
  for (std::int64_t f = 1; f < 5; ++f) {
    double d = 0.0;
    for (std::int64_t i = 0; i < plane; ++i) d = std::max(d, std::fabs(double(s.x.data()[f * plane + i]) - s.x.data()[i]));
    differing += d > 1e-3 ? 1 : 0;
  }
  CHECK(differing == 4);
}

TEST_CASE("apply_recipe validates its inputs") {
  RecipeOptions opt;
  opt.crop_size = 32;
  opt.bank_size = 4;
  const auto clip = clip_of(5, 40, 40, 1);
  CHECK_THROWS_AS(apply_recipe(clip, {}, NoiseBank{}, draw_recipe(1, opt)), DataError);
  CHECK_THROWS_AS(apply_recipe(clip_of(4, 40, 40, 1), {}, NoiseBank{}, identity_recipe(32, 5, 0)), DataError);
  CHECK_THROWS_AS(apply_recipe(clip, {}, NoiseBank{}, identity_recipe(32, 5, 1)), DataError);
  CHECK_THROWS_AS(apply_recipe(clip, {}, NoiseBank{}, identity_recipe(8, 5, 0)), DimensionError);
  std::vector<Image> mixed = clip;
  mixed[3] = gradient_rgb(40, 41, 1);
  CHECK_THROWS_AS(apply_recipe(mixed, {}, NoiseBank{}, identity_recipe(32, 5, 0)), DimensionError);
}

TEST_CASE("simulated JPEG degrades more at lower quality") {
  Image img = Image::zeros(1, 64, 64);
  for (std::int64_t y = 0; y < 64; ++y)
    for (std::int64_t x = 0; x < 64; ++x) img.at(0, y, x) = static_cast<float>(0.5 + 0.3 * std::sin(0.4 * x) * std::cos(0.3 * y));
  auto error = [&](int q) {
    const Image out = jpeg_simulate(img, q);
    double e = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) e += std::fabs(out.data[i] - img.data[i]);
    return e / static_cast<double>(img.data.size());
  };
  CHECK(error(100) < 0.005);
  CHECK(error(15) > error(40));
  CHECK(error(40) > error(90));

  // A flat image survives quantisation.
  const Image flat = Image::full(3, 16, 16, 0.5f);
  const Image out = jpeg_simulate(flat, 15);
  for (float v : out.data) CHECK(v == doctest::Approx(0.5f).epsilon(0.01));
}

TEST_CASE("pixel adjustments follow their definitions") {
  Image img = Image::full(3, 2, 2, 0.25f);
  img.at(0, 0, 0) = 1.0f;
  Image b = img;
  adjust_brightness(b, 1.2);
  CHECK(b.at(1, 1, 1) == doctest::Approx(0.3f));
  Image c = img;
  adjust_contrast(c, 0.6);
  CHECK(c.at(1, 1, 1) == doctest::Approx(0.35f));
  Image s = img;
  adjust_saturation(s, 0.0);
  CHECK(s.at(0, 0, 0) == doctest::Approx(s.at(1, 0, 0)));
  CHECK(s.at(0, 0, 0) == doctest::Approx(s.at(2, 0, 0)));
  Image s1 = img;
  adjust_saturation(s1, 1.0);
  CHECK(s1.data == img.data);
}

TEST_CASE("reference counts are uniform over zero to six") {
  const std::vector<std::int64_t> lengths{100, 50, 80};
  Rng rng(12);
  std::vector<int> counts(7, 0);
  constexpr int kDraws = 10000;
  for (int i = 0; i < kDraws; ++i) {
    const auto refs = sample_references(lengths, 1, 20, 5, rng);
    REQUIRE(refs.size() <= 6);
    ++counts[refs.size()];
    if (!refs.empty()) {
      CHECK(refs[0].video == 1);
      CHECK(refs[0].frame >= 15);
      CHECK(refs[0].frame <= 29);
    }
    for (const auto& r : refs) {
      REQUIRE(r.video < lengths.size());
      REQUIRE(r.frame >= 0);
      REQUIRE(r.frame < lengths[r.video]);
    }
  }
  for (int c : counts) CHECK(std::fabs(c / double(kDraws) - 1.0 / 7.0) <= 0.02);
}

TEST_CASE("single references always come from the neighbour window") {
  const std::vector<std::int64_t> lengths{30, 200};
  Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    const auto refs = sample_references(lengths, 0, 2, 5, rng, 1);
    if (refs.empty()) continue;
    REQUIRE(refs.size() == 1);
    CHECK(refs[0].video == 0);
    CHECK(refs[0].frame >= 0);
    CHECK(refs[0].frame <= 11);
  }
  Rng none(1);
  CHECK(sample_references(lengths, 0, 0, 5, none, 0).empty());
  CHECK_THROWS_AS(sample_references({}, 0, 0, 5, none), DataError);
}

TEST_CASE("PNG files round trip through disk") {
  const auto dir = std::filesystem::temp_directory_path() / "remaster_png_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Image rgb = gradient_rgb(9, 13, 3);
  for (auto& v : rgb.data) v = std::round(v * 255.0f) / 255.0f;
  save_png(dir / frame_name(1), rgb);
  save_png(dir / frame_name(0), rgb);
  const Image back = load_png(dir / frame_name(1));
  REQUIRE(back.channels == 3);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) CHECK(back.data[i] == doctest::Approx(rgb.data[i]).epsilon(1e-6));
  const Image grey = load_png(dir / frame_name(1), 1);
  CHECK(grey.channels == 1);

  const auto files = list_pngs(dir);
  REQUIRE(files.size() == 2);
  CHECK(files[0].filename() == "frame_0000001.png");

  NoiseBank bank;
  CHECK(bank.load_directory(dir) == 2);
  for (float v : bank.at(0).image.data) CHECK((v >= -0.5f && v <= 0.5f));
  CHECK(bank.at(0).kind == NoiseKind::kLoaded);

  CHECK_THROWS_AS(load_png(dir / "missing.png"), DataError);
  std::filesystem::remove_all(dir);
}
