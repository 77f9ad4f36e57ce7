#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "remaster/degrade.hpp"
#include "remaster/image.hpp"

namespace remaster {

/// A set of videos, each a sequence of RGB frames. Frames are either held in
/// memory or read from PNG files on demand.
class VideoDataset {
 public:
  /// `dir` is either a directory of PNG frames (one video) or a directory of
  /// such directories (one video each, sorted by name). Throws DataError.
  static VideoDataset load(const std::filesystem::path& dir);
  /// Procedural colour videos, see synthetic_video.
  static VideoDataset synthetic(std::size_t videos, std::int64_t frames, std::int64_t height, std::int64_t width,
                                std::uint64_t seed);

  void add_video(std::string id, std::vector<Image> frames);
  void add_video(std::string id, std::vector<std::filesystem::path> frame_files);

  std::size_t size() const { return videos_.size(); }
  bool empty() const { return videos_.empty(); }
  std::int64_t length(std::size_t video) const;
  const std::string& id(std::size_t video) const { return videos_.at(video).id; }
  std::vector<std::int64_t> lengths() const;

  Image frame(std::size_t video, std::int64_t index) const;
  std::vector<Image> clip(std::size_t video, std::int64_t start, std::int64_t count) const;

  /// Videos [begin, end) as a new dataset sharing no state with this one.
  VideoDataset subset(std::size_t begin, std::size_t end) const;

 private:
  struct Video {
    std::string id;
    std::vector<Image> frames;
    std::vector<std::filesystem::path> files;
  };
  std::vector<Video> videos_;
};

/// Deterministic colour video: a drifting two-tone background with textured
/// ellipses that move and slowly change hue, so distant frames carry
/// different colours.
std::vector<Image> synthetic_video(std::int64_t frames, std::int64_t height, std::int64_t width, std::uint64_t seed);

struct SampleOptions {
  std::int64_t crop_size = 32;
  std::int64_t clip_length = 5;
  std::int64_t max_references = 6;
  AugmentTable table{};
};

/// One training sample as a pure function of `seed`: picks a clip, samples
/// references, draws a recipe and applies it. Throws DataError if no video
/// is long enough.
TrainingSample make_sample(const VideoDataset& data, const NoiseBank& bank, const SampleOptions& opt,
                           std::uint64_t seed);

}  // namespace remaster
