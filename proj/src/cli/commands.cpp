#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "remaster/cli.hpp"
#include "remaster/colorspace.hpp"
#include "remaster/errors.hpp"
#include "remaster/eval.hpp"
#include "remaster/png_io.hpp"
#include "remaster/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace remaster::cli {

std::vector<Image> read_frame_sequence(const fs::path& dir) {
  const auto files = list_pngs(dir);
  if (files.empty()) throw DataError("no PNG frames in " + dir.string());
  std::vector<Image> frames;
  frames.reserve(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    if (name != frame_name(i)) {
      throw DataError("expected " + frame_name(i) + " in " + dir.string() + ", found " + name +
                      " (frames must be numbered frame_0000001.png upwards without gaps)");
    }
    frames.push_back(load_png(files[i], 3));
    if (frames.back().height != frames.front().height || frames.back().width != frames.front().width) {
      throw DataError(name + " is " + std::to_string(frames.back().width) + "x" + std::to_string(frames.back().height) +
                      ", earlier frames are " + std::to_string(frames.front().width) + "x" +
                      std::to_string(frames.front().height));
    }
  }
  return frames;
}

void write_frame_sequence(const fs::path& dir, const std::vector<Image>& frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) save_png(dir / frame_name(i), frames[i]);
}

std::vector<Image> luma_to_frames(const Tensor& luma) {
  return compose_output(luma, Tensor::full({1, 2, luma.shape()[2], luma.shape()[3], luma.shape()[4]}, 128.0f / 255.0f));
}

namespace {

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

std::string read_text(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

NoiseBank load_bank(const fs::path& dir) {
  NoiseBank bank;
  if (bank.load_directory(dir) == 0) throw DataError("noise bank " + dir.string() + " has no PNG images");
  return bank;
}

Tensor luma_tensor(const std::vector<Image>& frames) {
  const std::int64_t t = static_cast<std::int64_t>(frames.size());
  const std::int64_t h = frames.front().height, w = frames.front().width;
  std::vector<float> v;
  v.reserve(static_cast<std::size_t>(t * h * w));
  for (const auto& f : frames) {
    for (float x : rgb_to_luma(f).data) v.push_back(std::clamp(x, 0.0f, 1.0f));
  }
  return Tensor::from_data({1, 1, t, h, w}, std::move(v));
}

Tensor reference_tensor(const std::vector<Image>& refs) {
  const std::int64_t n = static_cast<std::int64_t>(refs.size());
  const std::int64_t h = refs.front().height, w = refs.front().width, plane = h * w;
  std::vector<float> v(static_cast<std::size_t>(3 * n * plane));
  for (std::int64_t j = 0; j < n; ++j)
    for (int c = 0; c < 3; ++c)
      std::copy_n(refs[static_cast<std::size_t>(j)].channel(c), plane, v.begin() + (c * n + j) * plane);
  return Tensor::from_data({1, 3, n, h, w}, std::move(v));
}

std::unique_ptr<RemasterModel> load_model(const fs::path& path) {
  const Checkpoint ckpt = load_checkpoint(path);
  auto model = std::make_unique<RemasterModel>(network_config_from(ckpt));
  apply_checkpoint(ckpt, model->params());
  return model;
}

// ---------------------------------------------------------------------------

struct RemasterArgs {
  fs::path input, refs, checkpoint, out;
  std::int64_t chunk = 15;
  bool no_color = false;
};

void cmd_remaster(const RemasterArgs& a, std::ostream& out) {
  const std::vector<Image> frames = read_frame_sequence(a.input);
  const std::int64_t h = frames.front().height, w = frames.front().width;

  std::vector<fs::path> ref_files;
  std::vector<Image> refs;
  json ref_list = json::array();
  if (!a.refs.empty()) {
    ref_files = list_pngs(a.refs);
    if (ref_files.empty()) throw DataError("no PNG references in " + a.refs.string());
    for (const auto& f : ref_files) {
      Image img = load_png(f, 3);
      const bool resized = img.height != h || img.width != w;
      if (resized) img = resize_bicubic(img, h, w);
      for (auto& v : img.data) v = std::clamp(v, 0.0f, 1.0f);
      ref_list.push_back({{"file", f.filename().string()}, {"resized", resized}});
      refs.push_back(std::move(img));
    }
  }

  auto model = load_model(a.checkpoint);
  InferenceOptions opt;
  opt.chunk = a.chunk;
  opt.color = !a.no_color;
  const InferenceResult r = run_inference(*model, luma_tensor(frames), refs.empty() ? Tensor{} : reference_tensor(refs), opt);

  write_frame_sequence(a.out / "luma", luma_to_frames(r.luma));
  if (opt.color) write_frame_sequence(a.out / "color", compose_output(r.luma, r.chroma));

  json chunks = json::array();
  for (const auto& c : r.chunks)
    chunks.push_back({{"begin", c.begin}, {"end", c.end}, {"keep_begin", c.keep_begin}, {"keep_end", c.keep_end}});
  const json manifest{{"schema", 1},
                      {"command", "remaster"},
                      {"input", a.input.string()},
                      {"checkpoint", a.checkpoint.string()},
                      {"frames", frames.size()},
                      {"height", h},
                      {"width", w},
                      {"padding", {{"bottom", r.pad_bottom}, {"right", r.pad_right}, {"mode", "reflect"}}},
                      {"chunk", {{"length", opt.chunk}, {"overlap", opt.overlap}}},
                      {"chunks", chunks},
                      {"references", ref_list},
                      {"automatic", refs.empty()},
                      {"color", opt.color},
                      {"width_divisor", model->config().width_divisor}};
  write_json(a.out / "manifest.json", manifest);
  out << "remastered " << frames.size() << " frames (" << r.chunks.size() << " chunks, "
      << (refs.empty() ? std::string("automatic") : std::to_string(refs.size()) + " references") << ") -> "
      << a.out.string() << '\n';
}

// ---------------------------------------------------------------------------

struct DegradeArgs {
  fs::path input, noise_bank, out, recipe;
  std::uint64_t seed = 0;
  bool emit_recipe = false;
};

void cmd_degrade(const DegradeArgs& a, std::ostream& out) {
  const std::vector<Image> frames = read_frame_sequence(a.input);
  const NoiseBank bank = load_bank(a.noise_bank);

  DegradeRecipe recipe;
  if (!a.recipe.empty()) {
    try {
      recipe = DegradeRecipe::from_json(read_text(a.recipe));
    } catch (const std::invalid_argument& e) {
      throw DataError("recipe " + a.recipe.string() + ": " + e.what());
    }
    if (recipe.crop_size != 0 || recipe.frames != static_cast<std::int64_t>(frames.size()))
      throw DataError("recipe " + a.recipe.string() + " was drawn for a different clip");
  } else {
    RecipeOptions ro;
    ro.crop_size = 0;
    ro.frames = static_cast<std::int64_t>(frames.size());
    ro.bank_size = bank.size();
    ro.joint_geometry = false;
    recipe = draw_recipe(a.seed, ro);
  }

  const TrainingSample s = apply_recipe(frames, {}, bank, recipe);
  write_frame_sequence(a.out, luma_to_frames(s.x));
  if (a.emit_recipe) {
    std::ofstream f(a.out / "recipe.json", std::ios::trunc);
    if (!f) throw DataError("cannot write recipe to " + a.out.string());
    f << recipe.to_json() << '\n';
  }
  out << "degraded " << frames.size() << " frames -> " << a.out.string() << '\n';
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  fs::path data, val, noise_bank, out;
  std::int64_t phase1 = 0, phase2 = 0, batch = 1;
  float beta = 1.0f;
  std::uint64_t seed = 1;
  std::int64_t crop = 32;
  int width_divisor = 8;
  std::int64_t val_samples = 4;
  int producers = 1;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  NetworkConfig net;
  net.width_divisor = a.width_divisor;
  net.seed = a.seed;
  net.validate();

  TrainConfig cfg;
  cfg.phase1_iters = a.phase1;
  cfg.phase2_iters = a.phase2;
  cfg.batch = a.batch;
  cfg.loss.beta = a.beta;
  cfg.samples.crop_size = a.crop;
  cfg.seed = a.seed;
  cfg.validation_samples = a.val_samples;
  cfg.producers = a.producers;
  cfg.validate();

  const VideoDataset data = VideoDataset::load(a.data);
  const VideoDataset val = a.val.empty() ? VideoDataset{} : VideoDataset::load(a.val);
  const NoiseBank bank = load_bank(a.noise_bank);

  RemasterModel model(net);
  const TrainResult r = train(model, data, val, bank, cfg, [&](const LogRow& row) {
    if (row.val_loss < 0) return;
    out << "iter " << row.iter << " phase " << row.phase << " train " << std::setprecision(6) << row.train_loss
        << " val " << row.val_loss << '\n';
  });

  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  save_checkpoint(capture_checkpoint(model.params()), a.out);
  fs::path log = a.out, manifest = a.out;
  log.replace_extension(".log.csv");
  manifest.replace_extension(".run.json");
  write_log_csv(r.log, log);

  const json j{{"schema", 1},
               {"command", "train"},
               {"data", a.data.string()},
               {"validation", a.val.string()},
               {"noise_bank", a.noise_bank.string()},
               {"noise_images", bank.size()},
               {"videos", data.size()},
               {"iters_phase1", a.phase1},
               {"iters_phase2", a.phase2},
               {"batch", a.batch},
               {"beta", a.beta},
               {"seed", a.seed},
               {"crop", a.crop},
               {"clip_length", cfg.samples.clip_length},
               {"max_references", cfg.samples.max_references},
               {"width_divisor", a.width_divisor},
               {"validation_samples", a.val_samples},
               {"optimizer", {{"name", "adadelta"}, {"rho", cfg.optimizer.rho}, {"eps", cfg.optimizer.eps}}},
               {"best_val_loss", r.best_val_loss},
               {"best_iter", r.best_iter},
               {"checkpoint", a.out.string()},
               {"log", log.string()}};
  write_json(manifest, j);
  out << "best validation loss " << r.best_val_loss << " at iteration " << r.best_iter << " -> " << a.out.string()
      << '\n';
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  fs::path videos, checkpoint, out, noise_bank;
  std::string regime = "90x1", mode = "remastering";
  std::uint64_t seed = 0;
  std::size_t max_videos = 0;
  int workers = 1;
};

void cmd_eval(const EvalArgs& a, std::ostream& out) {
  BenchmarkOptions opt;
  opt.regime = parse_regime(a.regime);
  opt.mode = parse_psnr_mode(a.mode);
  opt.seed = a.seed;
  opt.max_videos = a.max_videos;
  opt.workers = a.workers;

  const VideoDataset videos = VideoDataset::load(a.videos);
  const NoiseBank bank = a.noise_bank.empty() ? NoiseBank{} : load_bank(a.noise_bank);
  auto model = load_model(a.checkpoint);
  const EvalReport r = run_benchmark(videos, model_predictor(*model), bank, opt);

  if (a.out.has_parent_path()) fs::create_directories(a.out.parent_path());
  std::ofstream f(a.out, std::ios::trunc);
  if (!f) throw DataError("cannot write " + a.out.string());
  f << r.to_json() << '\n';
  out << r.to_table();
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  fs::path out, noise_out;
  std::size_t videos = 4;
  std::int64_t frames = 30, height = 64, width = 64;
  std::size_t noise_count = 8;
  std::int64_t noise_size = 256;
  std::uint64_t seed = 0;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  const VideoDataset ds = VideoDataset::synthetic(a.videos, a.frames, a.height, a.width, a.seed);
  for (std::size_t v = 0; v < ds.size(); ++v) write_frame_sequence(a.out / ds.id(v), ds.clip(v, 0, ds.length(v)));
  out << "wrote " << ds.size() << " videos of " << a.frames << " frames -> " << a.out.string() << '\n';
  if (a.noise_out.empty()) return;
  NoiseBank bank;
  bank.add_procedural(a.noise_count, a.noise_size, Rng::mix(a.seed, 0x6e6f697365ULL));
  fs::create_directories(a.noise_out);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    Image img = bank.at(i).image;
    for (auto& v : img.data) v += 0.5f;
    char name[64];
    std::snprintf(name, sizeof name, "%03zu_%s.png", i, bank.at(i).source.c_str());
    save_png(a.noise_out / name, img);
  }
  out << "wrote " << bank.size() << " noise images -> " << a.noise_out.string() << '\n';
}

int fail(std::ostream& err, const std::string& kind, const std::string& what, int code) {
  err << "error (" << kind << "): " << what << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video restoration and reference-based colorization"};
  app.name("remaster");
  app.require_subcommand(1);

  RemasterArgs ra;
  auto* remaster = app.add_subcommand("remaster", "Restore and colorize a frame sequence");
  remaster->add_option("--input", ra.input, "Directory of greyscale frames")->required()->check(CLI::ExistingDirectory);
  remaster->add_option("--refs", ra.refs, "Directory of colour reference images")->check(CLI::ExistingDirectory);
  remaster->add_option("--checkpoint", ra.checkpoint, "Model checkpoint")->required();
  remaster->add_option("--out", ra.out, "Output directory")->required();
  remaster->add_option("--chunk", ra.chunk, "Frames per inference chunk")->check(CLI::Range(3, 100000));
  remaster->add_flag("--no-color", ra.no_color, "Write restored luminance only");

  DegradeArgs da;
  auto* degrade = app.add_subcommand("degrade", "Apply a seeded degradation to a frame sequence");
  degrade->add_option("--input", da.input, "Directory of clean colour frames")->required()->check(CLI::ExistingDirectory);
  degrade->add_option("--noise-bank", da.noise_bank, "Directory of film-damage PNGs")->required()->check(CLI::ExistingDirectory);
  degrade->add_option("--seed", da.seed, "Recipe seed");
  degrade->add_option("--out", da.out, "Output directory")->required();
  degrade->add_flag("--emit-recipe", da.emit_recipe, "Also write recipe.json");
  degrade->add_option("--recipe", da.recipe, "Replay a recipe.json instead of drawing one")->check(CLI::ExistingFile);

  TrainArgs ta;
  auto* trainc = app.add_subcommand("train", "Train a model with the two-phase schedule");
  trainc->add_option("--data", ta.data, "Directory of videos (frame directories)")->required()->check(CLI::ExistingDirectory);
  trainc->add_option("--val", ta.val, "Held-out videos (default: samples from --data)")->check(CLI::ExistingDirectory);
  trainc->add_option("--noise-bank", ta.noise_bank, "Directory of film-damage PNGs")->required()->check(CLI::ExistingDirectory);
  trainc->add_option("--iters-phase1", ta.phase1, "Separate-training iterations")->check(CLI::NonNegativeNumber);
  trainc->add_option("--iters-phase2", ta.phase2, "Joint-training iterations")->check(CLI::NonNegativeNumber);
  trainc->add_option("--batch", ta.batch, "Samples per iteration")->check(CLI::PositiveNumber);
  trainc->add_option("--beta", ta.beta, "Chrominance loss weight")->check(CLI::NonNegativeNumber);
  trainc->add_option("--seed", ta.seed, "Seed for initialization and sampling");
  trainc->add_option("--out", ta.out, "Checkpoint file")->required();
  trainc->add_option("--crop", ta.crop, "Training crop size, a multiple of 16");
  trainc->add_option("--width-divisor", ta.width_divisor, "Divides every hidden width (1 = full size)");
  trainc->add_option("--val-samples", ta.val_samples, "Held-out samples per validation")->check(CLI::PositiveNumber);
  trainc->add_option("--producers", ta.producers, "Sample producer threads")->check(CLI::NonNegativeNumber);

  EvalArgs ea;
  auto* evalc = app.add_subcommand("eval", "Score a checkpoint on a video benchmark");
  evalc->add_option("--videos", ea.videos, "Directory of videos")->required()->check(CLI::ExistingDirectory);
  evalc->add_option("--checkpoint", ea.checkpoint, "Model checkpoint")->required();
  evalc->add_option("--regime", ea.regime, "Frames and reference layout")->check(CLI::IsMember({"90x1", "300x5"}));
  evalc->add_option("--mode", ea.mode, "Channels scored")
      ->check(CLI::IsMember({"restoration", "colorization", "remastering"}));
  evalc->add_option("--seed", ea.seed, "Seed for windows and degradations");
  evalc->add_option("--out", ea.out, "Report JSON")->required();
  evalc->add_option("--noise-bank", ea.noise_bank, "Film-damage PNGs for the degradation")->check(CLI::ExistingDirectory);
  evalc->add_option("--max-videos", ea.max_videos, "Evaluate a seeded subset of this size (0 = all)");
  evalc->add_option("--workers", ea.workers, "Videos scored in parallel")->check(CLI::PositiveNumber);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Write procedural colour videos and an optional noise bank");
  synth->add_option("--out", sa.out, "Output directory (one subdirectory per video)")->required();
  synth->add_option("--videos", sa.videos, "Number of videos")->check(CLI::PositiveNumber);
  synth->add_option("--frames", sa.frames, "Frames per video")->check(CLI::PositiveNumber);
  synth->add_option("--height", sa.height, "Frame height")->check(CLI::PositiveNumber);
  synth->add_option("--width", sa.width, "Frame width")->check(CLI::PositiveNumber);
  synth->add_option("--seed", sa.seed, "Seed");
  synth->add_option("--noise-out", sa.noise_out, "Also write a procedural noise bank here");
  synth->add_option("--noise-count", sa.noise_count, "Noise images")->check(CLI::PositiveNumber);
  synth->add_option("--noise-size", sa.noise_size, "Noise image edge")->check(CLI::Range(64, 4096));

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*remaster) cmd_remaster(ra, out);
    if (*degrade) cmd_degrade(da, out);
    if (*trainc) cmd_train(ta, out);
    if (*evalc) cmd_eval(ea, out);
    if (*synth) cmd_synth(sa, out);
  } catch (const CheckpointError& e) {
    return fail(err, "checkpoint", e.what(), kCheckpointError);
  } catch (const DataError& e) {
    return fail(err, "data", e.what(), kDataError);
  } catch (const DimensionError& e) {
    return fail(err, "data", e.what(), kDataError);
  } catch (const fs::filesystem_error& e) {
    return fail(err, "data", e.what(), kDataError);
  } catch (const std::invalid_argument& e) {
    return fail(err, "usage", e.what(), kUsage);
  } catch (const std::exception& e) {
    return fail(err, "internal", e.what(), kFailure);
  }
  return kOk;
}

}  // namespace remaster::cli
