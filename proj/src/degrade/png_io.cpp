#include "remaster/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "remaster/errors.hpp"

namespace remaster {

Image load_png(const std::filesystem::path& path, int channels) {
  if (channels != 1 && channels != 3) throw DimensionError("channels", "load_png supports 1 or 3 channels");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw DataError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw DataError("cannot decode PNG " + path.string() + ": " + msg);
  }
  Image out = Image::zeros(channels, image.height, image.width);
  const std::int64_t n = out.plane();
  for (std::int64_t i = 0; i < n; ++i)
    for (int c = 0; c < channels; ++c)
      out.channel(c)[i] = static_cast<float>(buffer[static_cast<std::size_t>(i * channels + c)]) / 255.0f;
  return out;
}

void save_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels != 1 && img.channels != 3) throw DimensionError("channels", "save_png supports 1 or 3 channels");
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<png_byte> buffer(static_cast<std::size_t>(img.plane() * img.channels));
  const std::int64_t n = img.plane();
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t c = 0; c < img.channels; ++c)
      buffer[static_cast<std::size_t>(i * img.channels + c)] =
          static_cast<png_byte>(std::lround(std::clamp(img.channel(c)[i], 0.0f, 1.0f) * 255.0f));
  if (!png_image_write_to_file(&image, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw DataError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw DataError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%07zu.png", index + 1);
  return buf;
}

}  // namespace remaster
