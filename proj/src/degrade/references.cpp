#include <algorithm>

#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"

namespace remaster {

std::vector<FrameRef> sample_references(const std::vector<std::int64_t>& video_lengths, std::size_t video,
                                        std::int64_t clip_start, std::int64_t clip_length, Rng& rng,
                                        std::int64_t max_count, std::int64_t window) {
  if (video_lengths.empty()) throw DataError("cannot sample references from an empty dataset");
  if (video >= video_lengths.size()) throw DataError("clip video index out of range");
  std::int64_t total = 0;
  for (auto n : video_lengths) total += n;
  if (total <= 0) throw DataError("dataset has no frames");

  const std::int64_t count = rng.uniform_int(0, max_count);
  std::vector<FrameRef> out;
  if (count == 0) return out;

  const std::int64_t last = video_lengths[video] - 1;
  const std::int64_t lo = std::clamp<std::int64_t>(clip_start - window, 0, last);
  const std::int64_t hi = std::clamp<std::int64_t>(clip_start + clip_length - 1 + window, 0, last);
  out.push_back({video, rng.uniform_int(lo, hi)});

  for (std::int64_t i = 1; i < count; ++i) {
    std::int64_t g = rng.uniform_int(0, total - 1);
    std::size_t v = 0;
    while (g >= video_lengths[v]) g -= video_lengths[v++];
    out.push_back({v, g});
  }
  return out;
}

}  // namespace remaster
