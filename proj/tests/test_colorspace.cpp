#include <cmath>

#include "doctest.h"
#include "remaster/colorspace.hpp"
#include "remaster/errors.hpp"
#include "remaster/rng.hpp"

using namespace remaster;

namespace {

double to_linear(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }

}  // namespace

TEST_CASE("white and black map to the ends of the lightness axis") {
  const Lab white = rgb_to_lab(1.0, 1.0, 1.0);
  CHECK(white.l == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(white.a == doctest::Approx(128.0 / 255.0).epsilon(1e-4));
  CHECK(white.b == doctest::Approx(128.0 / 255.0).epsilon(1e-4));
  const Lab black = rgb_to_lab(0.0, 0.0, 0.0);
  CHECK(black.l == doctest::Approx(0.0));
}

TEST_CASE("primary colours match published CIE Lab values") {
  // sRGB red, green and blue under D65.
  struct Case {
    double r, g, b, l, a, bb;
  } cases[] = {{1, 0, 0, 53.24, 80.09, 67.20}, {0, 1, 0, 87.73, -86.18, 83.18}, {0, 0, 1, 32.30, 79.19, -107.86}};
  for (const auto& c : cases) {
    const Lab lab = rgb_to_lab(c.r, c.g, c.b);
    CHECK(lab.l * 100.0 == doctest::Approx(c.l).epsilon(1e-3));
    CHECK(lab.a * 255.0 - 128.0 == doctest::Approx(c.a).epsilon(1e-3));
    CHECK(lab.b * 255.0 - 128.0 == doctest::Approx(c.bb).epsilon(1e-3));
  }
}

TEST_CASE("8-bit round trip stays within 2/255 for random colours") {
  Rng rng(1);
  Rgb8Frame frame{1, 1000, std::vector<std::uint8_t>(3000)};
  for (auto& v : frame.rgb) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
  const Rgb8Frame back = to_rgb8(lab_to_rgb(rgb_to_lab(from_rgb8(frame))));
  int worst = 0;
  for (std::size_t i = 0; i < frame.rgb.size(); ++i) worst = std::max(worst, std::abs(int(frame.rgb[i]) - int(back.rgb[i])));
  CHECK(worst <= 2);
}

TEST_CASE("8-bit round trip holds on every face of the colour cube") {
  // Saturated colours sit on the gamut boundary, where float storage of Lab
  // can push them just outside it.
  Rgb8Frame frame{6 * 256, 256, std::vector<std::uint8_t>(6 * 256 * 256 * 3)};
  std::size_t i = 0;
  for (int face = 0; face < 6; ++face)
    for (int u = 0; u < 256; ++u)
      for (int v = 0; v < 256; ++v, i += 3) {
        const int fixed = face % 2 ? 255 : 0;
        int rgb[3];
        rgb[face / 2] = fixed;
        rgb[(face / 2 + 1) % 3] = u;
        rgb[(face / 2 + 2) % 3] = v;
        for (int c = 0; c < 3; ++c) frame.rgb[i + c] = static_cast<std::uint8_t>(rgb[c]);
      }
  const Rgb8Frame back = to_rgb8(lab_to_rgb(rgb_to_lab(from_rgb8(frame))));
  int worst = 0;
  for (std::size_t k = 0; k < frame.rgb.size(); ++k) worst = std::max(worst, std::abs(int(frame.rgb[k]) - int(back.rgb[k])));
  CHECK(worst <= 2);
}

TEST_CASE("neutral chrominance composes a grey image") {
  Tensor luma = Tensor::from_data({2, 1, 3}, {0.0f, 0.2f, 0.4f, 0.6f, 0.8f, 1.0f});
  Tensor chroma = Tensor::full({2, 2, 1, 3}, 128.0f / 255.0f);
  auto frames = compose_output(luma, chroma);
  REQUIRE(frames.size() == 2);
  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const Image& f = frames[fi];
    const Rgb8Frame q = to_rgb8(f);
    for (std::int64_t i = 0; i < 3; ++i) {
      CHECK(std::abs(int(q.rgb[i * 3]) - int(q.rgb[i * 3 + 1])) <= 1);
      CHECK(std::abs(int(q.rgb[i * 3]) - int(q.rgb[i * 3 + 2])) <= 1);
    }
    // The grey level reproduces the lightness it came from.
    for (std::int64_t i = 0; i < 3; ++i) {
      const double r = f.channel(0)[i];
      CHECK(rgb_to_lab(r, r, r).l == doctest::Approx(luma.data()[fi * 3 + i]).epsilon(2e-3));
    }
  }
}

TEST_CASE("zero luminance composes black frames whatever the chrominance") {
  Tensor luma = Tensor::zeros({1, 4, 4});
  Rng rng(2);
  std::vector<float> ab(32);
  for (auto& v : ab) v = static_cast<float>(rng.uniform());
  auto frames = compose_output(luma, Tensor::from_data({2, 1, 4, 4}, ab));
  for (float v : frames[0].data) CHECK(v == doctest::Approx(0.0f).epsilon(1e-6));
}

TEST_CASE("compose of a Lab-converted image reproduces it") {
  Rng rng(3);
  Image rgb = Image::zeros(3, 4, 5);
  for (auto& v : rgb.data) v = static_cast<float>(rng.uniform_int(0, 255)) / 255.0f;
  Image lab = rgb_to_lab(rgb);
  Tensor l = Tensor::from_data({1, 4, 5}, std::vector<float>(lab.channel(0), lab.channel(0) + 20));
  Tensor ab = Tensor::from_data({2, 1, 4, 5}, std::vector<float>(lab.channel(1), lab.channel(1) + 40));
  auto frames = compose_output(l, ab);
  for (std::size_t i = 0; i < rgb.data.size(); ++i) CHECK(std::fabs(frames[0].data[i] - rgb.data[i]) <= 2.0 / 255.0);
}

TEST_CASE("compose checks that luminance and chrominance agree") {
  CHECK_THROWS_AS(compose_output(Tensor::zeros({2, 4, 4}), Tensor::zeros({2, 3, 4, 4})), DimensionError);
  CHECK_THROWS_AS(compose_output(Tensor::zeros({2, 4, 4}), Tensor::zeros({3, 2, 4, 4})), DimensionError);
  try {
    compose_output(Tensor::zeros({2, 4, 4}), Tensor::zeros({2, 2, 4, 5}));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(e.axis() == "width");
  }
}

TEST_CASE("raising lightness never lowers relative luminance") {
  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = rng.uniform(), b = rng.uniform();
    double previous = -1.0;
    for (int k = 0; k <= 50; ++k) {
      double r, g, bl;
      lab_to_rgb({k / 50.0, a, b}, r, g, bl);
      const double y = 0.2126 * to_linear(r) + 0.7152 * to_linear(g) + 0.0722 * to_linear(bl);
      CHECK(y >= previous - 1e-12);
      previous = y;
    }
  }
}

TEST_CASE("out-of-gamut Lab values are clamped into RGB range") {
  double r, g, b;
  lab_to_rgb({0.5, 1.0, 0.0}, r, g, b);
  for (double v : {r, g, b}) CHECK((v >= 0.0 && v <= 1.0));
}
