#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "remaster/errors.hpp"
#include "remaster/eval.hpp"

namespace remaster {

Regime parse_regime(const std::string& name) {
  if (name == "90x1") return {"90x1", 90, {0}};
  if (name == "300x5") return {"300x5", 300, {0, 60, 120, 180, 240}};
  throw std::invalid_argument("unknown regime '" + name + "' (expected 90x1 or 300x5)");
}

namespace {

double mse(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.defined()) throw std::invalid_argument(std::string("predictor returned no ") + what);
  if (a.shape() != b.shape()) {
    throw DimensionError("channels", std::string(what) + " prediction " + shape_to_string(a.shape()) +
                                         " does not match target " + shape_to_string(b.shape()));
  }
  const auto x = a.data(), y = b.data();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = static_cast<double>(x[i]) - y[i];
    s += d * d;
  }
  return s / static_cast<double>(x.size());
}

}  // namespace

BenchmarkClip make_benchmark_clip(const VideoDataset& videos, std::size_t video, const NoiseBank& bank,
                                  const BenchmarkOptions& opt) {
  const std::int64_t frames = opt.regime.frames;
  const std::int64_t length = videos.length(video);
  if (length < frames) {
    throw DataError("video " + videos.id(video) + " has " + std::to_string(length) + " frames, regime " +
                    opt.regime.name + " needs " + std::to_string(frames));
  }
  for (auto off : opt.regime.ref_offsets)
    if (off < 0 || off >= frames) throw std::invalid_argument("reference offset outside the evaluation window");

  Rng rng(Rng::mix(opt.seed, video));
  BenchmarkClip c;
  c.video_id = videos.id(video);
  c.start = rng.uniform_int(0, length - frames);

  RecipeOptions ro;
  ro.crop_size = 0;
  ro.frames = frames;
  ro.bank_size = bank.size();
  ro.joint_geometry = false;
  ro.table = opt.table;
  DegradeRecipe recipe = draw_recipe(rng.next_u64(), ro);
  // Targets stay the original frames.
  recipe.brightness = recipe.contrast = false;

  const std::vector<Image> clip = videos.clip(video, c.start, frames);
  const TrainingSample s = apply_recipe(clip, {}, bank, recipe);
  c.degraded = s.x;
  c.y_l = s.y_l;
  c.y_ab = s.y_ab;

  const std::int64_t n = static_cast<std::int64_t>(opt.regime.ref_offsets.size());
  const std::int64_t h = clip.front().height, w = clip.front().width, plane = h * w;
  std::vector<float> refs(static_cast<std::size_t>(3 * n * plane));
  for (std::int64_t j = 0; j < n; ++j) {
    const Image& img = clip[static_cast<std::size_t>(opt.regime.ref_offsets[static_cast<std::size_t>(j)])];
    for (int ch = 0; ch < 3; ++ch) std::copy_n(img.channel(ch), plane, refs.begin() + (ch * n + j) * plane);
  }
  if (n > 0) c.refs = Tensor::from_data({1, 3, n, h, w}, std::move(refs));
  return c;
}

Predictor model_predictor(const RemasterModel& model, const InferenceOptions& opt) {
  return [&model, opt](const BenchmarkClip& clip, PsnrMode mode) {
    Prediction p;
    if (mode == PsnrMode::kColorization) {
      p.chroma = run_colorization(model, clip.y_l, clip.refs, opt);
      return p;
    }
    InferenceOptions o = opt;
    o.color = mode == PsnrMode::kRemastering;
    InferenceResult r = run_inference(model, clip.degraded, clip.refs, o);
    p.luma = r.luma;
    p.chroma = r.chroma;
    return p;
  };
}

EvalReport run_benchmark(const VideoDataset& videos, const Predictor& predict, const NoiseBank& bank,
                         const BenchmarkOptions& opt) {
  if (videos.empty()) throw DataError("no videos to evaluate");
  std::vector<std::size_t> chosen(videos.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  if (opt.max_videos > 0 && opt.max_videos < chosen.size()) {
    Rng rng(opt.seed);
    for (std::size_t i = chosen.size() - 1; i > 0; --i)
      std::swap(chosen[i], chosen[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)))]);
    chosen.resize(opt.max_videos);
    std::sort(chosen.begin(), chosen.end());
  }
  for (auto v : chosen) {
    if (videos.length(v) < opt.regime.frames) {
      throw DataError("video " + videos.id(v) + " has " + std::to_string(videos.length(v)) + " frames, regime " +
                      opt.regime.name + " needs " + std::to_string(opt.regime.frames));
    }
  }

  EvalReport report;
  report.mode = opt.mode;
  report.regime = opt.regime.name;
  report.ref_offsets = opt.regime.ref_offsets;
  report.seed = opt.seed;
  report.per_video.resize(chosen.size());

  auto score = [&](std::size_t k) {
    const BenchmarkClip clip = make_benchmark_clip(videos, chosen[k], bank, opt);
    const Prediction p = predict(clip, opt.mode);
    double m = 0.0;
    switch (opt.mode) {
      case PsnrMode::kRestoration: m = mse(p.luma, clip.y_l, "luminance"); break;
      case PsnrMode::kColorization: m = mse(p.chroma, clip.y_ab, "chrominance"); break;
      case PsnrMode::kRemastering:
        m = (mse(p.luma, clip.y_l, "luminance") + 2.0 * mse(p.chroma, clip.y_ab, "chrominance")) / 3.0;
        break;
    }
    report.per_video[k] = {clip.video_id, psnr_from_mse(m), opt.regime.frames, clip.start};
  };

  const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(chosen.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < chosen.size(); ++k) score(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) {
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < chosen.size();) {
          try {
            score(k);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!error) error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  double sum = 0.0;
  for (const auto& v : report.per_video) sum += v.psnr_db;
  report.mean_psnr_db = sum / static_cast<double>(report.per_video.size());
  return report;
}

std::string EvalReport::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& v : per_video) per.push_back({{"id", v.id}, {"psnr_db", v.psnr_db}, {"frames", v.frames}, {"start", v.start}});
  const nlohmann::json j{{"schema", 1},
                         {"mode", psnr_mode_name(mode)},
                         {"regime", regime},
                         {"reference_offsets", ref_offsets},
                         {"seed", seed},
                         {"per_video", per},
                         {"mean_psnr_db", mean_psnr_db}};
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "mode %s, regime %s, seed %llu\n", psnr_mode_name(mode), regime.c_str(),
                static_cast<unsigned long long>(seed));
  out << line;
  std::snprintf(line, sizeof line, "%-32s %8s %8s %10s\n", "video", "start", "frames", "psnr_db");
  out << line;
  for (const auto& v : per_video) {
    std::snprintf(line, sizeof line, "%-32s %8lld %8lld %10.3f\n", v.id.c_str(), static_cast<long long>(v.start),
                  static_cast<long long>(v.frames), v.psnr_db);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-32s %8s %8s %10.3f\n", "mean", "", "", mean_psnr_db);
  out << line;
  return out.str();
}

}  // namespace remaster
