#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "remaster/dataset.hpp"
#include "remaster/networks.hpp"

namespace remaster {

// ---------------------------------------------------------------------------
// PSNR

/// Which normalized Lab channels a score covers: L only, a and b only, or all three.
enum class PsnrMode { kRestoration, kColorization, kRemastering };

const char* psnr_mode_name(PsnrMode mode);
/// "restoration" | "colorization" | "remastering"; throws std::invalid_argument.
PsnrMode parse_psnr_mode(const std::string& name);

/// Reported for a zero MSE.
constexpr double kPsnrCap = 99.0;

/// Mean squared error over the channels selected by `mode`. Both tensors are
/// (3, T, H, W) or (1, 3, T, H, W) with channels L, a, b in [0, 1].
double masked_mse(const Tensor& pred, const Tensor& target, PsnrMode mode);
/// 10 log10(1 / mse), or kPsnrCap when mse is zero.
double psnr_from_mse(double mse);
double psnr(const Tensor& pred, const Tensor& target, PsnrMode mode);

/// Stacks RGB frames into normalized Lab (3, T, H, W).
Tensor lab_video(const std::vector<Image>& rgb);

// ---------------------------------------------------------------------------
// Chunked inference

struct Chunk {
  std::int64_t begin = 0, end = 0;            // frames fed to the model
  std::int64_t keep_begin = 0, keep_end = 0;  // frames whose output is kept
};

/// Chunks of `length` frames advancing by length - overlap. Each overlap is
/// split at its middle; the last chunk is shifted back to stay full-length.
std::vector<Chunk> plan_chunks(std::int64_t frames, std::int64_t length = 15, std::int64_t overlap = 2);

struct InferenceOptions {
  std::int64_t chunk = 15;
  std::int64_t overlap = 2;
  bool color = true;
};

struct InferenceResult {
  Tensor luma;    // (1, 1, T, H, W)
  Tensor chroma;  // (1, 2, T, H, W), undefined without colour
  std::int64_t pad_bottom = 0, pad_right = 0;
  std::vector<Chunk> chunks;
};

/// Bottom/right reflect padding of a (B, C, T, H, W) tensor.
Tensor reflect_pad(const Tensor& x, std::int64_t bottom, std::int64_t right);
/// Inverse of reflect_pad: keeps the top-left height x width region.
Tensor crop_spatial(const Tensor& x, std::int64_t height, std::int64_t width);

/// Restores (and colorizes) a whole greyscale clip (1, 1, T, H, W) in eval
/// mode. Frames are reflect-padded to multiples of 16 and cropped back; every
/// chunk sees all references (1, 3, N, Hr, Wr), which may be undefined.
InferenceResult run_inference(const RemasterModel& model, const Tensor& luma, const Tensor& refs,
                              const InferenceOptions& opt = {});
/// Colorization only, from a given luminance clip.
Tensor run_colorization(const RemasterModel& model, const Tensor& luma, const Tensor& refs,
                        const InferenceOptions& opt = {});

// ---------------------------------------------------------------------------
// Benchmark

struct Regime {
  std::string name;
  std::int64_t frames = 90;
  std::vector<std::int64_t> ref_offsets{0};
};

/// "90x1": 90 frames, first frame as reference. "300x5": 300 frames,
/// references every 60th frame from the first. Throws std::invalid_argument.
Regime parse_regime(const std::string& name);

/// One evaluation window, with every tensor over the full frame size.
struct BenchmarkClip {
  std::string video_id;
  std::int64_t start = 0;
  Tensor degraded;  // (1, 1, T, H, W)
  Tensor y_l;       // (1, 1, T, H, W)
  Tensor y_ab;      // (1, 2, T, H, W)
  Tensor refs;      // (1, 3, N, H, W) clean colour frames at the regime offsets
};

struct Prediction {
  Tensor luma;    // (1, 1, T, H, W); may be undefined in colorization mode
  Tensor chroma;  // (1, 2, T, H, W); may be undefined in restoration mode
};

using Predictor = std::function<Prediction(const BenchmarkClip&, PsnrMode)>;

/// Restoration runs P on the degraded clip; colorization runs S on the clean
/// luminance; remastering runs the whole model on the degraded clip.
Predictor model_predictor(const RemasterModel& model, const InferenceOptions& opt = {});

struct BenchmarkOptions {
  Regime regime = parse_regime("90x1");
  PsnrMode mode = PsnrMode::kRemastering;
  std::uint64_t seed = 0;
  /// Evaluate at most this many videos (chosen by seed); 0 = all.
  std::size_t max_videos = 0;
  /// Parallel video workers.
  int workers = 1;
  AugmentTable table{};
};

struct VideoScore {
  std::string id;
  double psnr_db = 0;
  std::int64_t frames = 0;
  std::int64_t start = 0;
};

struct EvalReport {
  PsnrMode mode = PsnrMode::kRemastering;
  std::string regime;
  std::vector<std::int64_t> ref_offsets;
  std::uint64_t seed = 0;
  std::vector<VideoScore> per_video;
  double mean_psnr_db = 0;

  std::string to_json() const;
  std::string to_table() const;
};

/// Builds the evaluation window for one video: a seed-chosen start, the
/// degradation drawn with `bank` (whole frames, no geometric augmentation),
/// and clean references at the regime offsets.
BenchmarkClip make_benchmark_clip(const VideoDataset& videos, std::size_t video, const NoiseBank& bank,
                                  const BenchmarkOptions& opt);

/// Throws DataError if a selected video is shorter than the regime.
EvalReport run_benchmark(const VideoDataset& videos, const Predictor& predict, const NoiseBank& bank,
                         const BenchmarkOptions& opt);

}  // namespace remaster
