#include <algorithm>
#include <string>

#include "remaster/errors.hpp"
#include "remaster/eval.hpp"

namespace remaster {

std::vector<Chunk> plan_chunks(std::int64_t frames, std::int64_t length, std::int64_t overlap) {
  if (frames < 1) throw DimensionError("time", "cannot plan chunks for an empty clip");
  if (length < 1 || overlap < 0 || overlap >= length) {
    throw std::invalid_argument("chunk length must be positive and larger than the overlap");
  }
  std::vector<Chunk> chunks;
  if (frames <= length) return {{0, frames, 0, frames}};
  for (std::int64_t s = 0;; s += length - overlap) {
    if (s + length >= frames) {
      chunks.push_back({frames - length, frames, 0, 0});
      break;
    }
    chunks.push_back({s, s + length, 0, 0});
  }
  chunks.front().keep_begin = 0;
  chunks.back().keep_end = frames;
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    const std::int64_t mid = (chunks[i].begin + chunks[i - 1].end) / 2;
    chunks[i - 1].keep_end = mid;
    chunks[i].keep_begin = mid;
  }
  return chunks;
}

namespace {

std::int64_t reflect_index(std::int64_t i, std::int64_t n) {
  if (n == 1) return 0;
  const std::int64_t period = 2 * (n - 1);
  i %= period;
  return i < n ? i : period - i;
}

// Frames [begin, end) of a (1, C, T, H, W) tensor.
Tensor slice_time(const Tensor& x, std::int64_t begin, std::int64_t end) {
  const Shape& s = x.shape();
  const std::int64_t c = s[1], t = s[2], plane = s[3] * s[4], n = end - begin;
  std::vector<float> out(static_cast<std::size_t>(c * n * plane));
  const auto src = x.data();
  for (std::int64_t ch = 0; ch < c; ++ch)
    std::copy_n(src.begin() + (ch * t + begin) * plane, n * plane, out.begin() + ch * n * plane);
  return Tensor::from_data({1, c, n, s[3], s[4]}, std::move(out));
}

// Writes frames [keep_begin, keep_end) of a chunk output into `dst`.
void keep_frames(const Tensor& chunk_out, const Chunk& chunk, std::vector<float>& dst, std::int64_t total) {
  const Shape& s = chunk_out.shape();
  const std::int64_t c = s[1], n = s[2], plane = s[3] * s[4];
  const auto src = chunk_out.data();
  for (std::int64_t ch = 0; ch < c; ++ch)
    for (std::int64_t f = chunk.keep_begin; f < chunk.keep_end; ++f)
      std::copy_n(src.begin() + (ch * n + f - chunk.begin) * plane, plane, dst.begin() + (ch * total + f) * plane);
}

std::int64_t pad_to(std::int64_t v, std::int64_t multiple) { return (multiple - v % multiple) % multiple; }

void check_clip(const Tensor& luma) {
  if (!luma.defined() || luma.rank() != 5 || luma.dim(0) != 1 || luma.dim(1) != 1) {
    throw DimensionError("channels", "inference input must be (1, 1, T, H, W)");
  }
}

Tensor padded_refs(const Tensor& refs) {
  if (!refs.defined() || refs.numel() == 0) return {};
  return reflect_pad(refs, pad_to(refs.dim(3), 16), pad_to(refs.dim(4), 16));
}

}  // namespace

Tensor reflect_pad(const Tensor& x, std::int64_t bottom, std::int64_t right) {
  if (x.rank() != 5) throw DimensionError("rank", "reflect_pad expects (B, C, T, H, W)");
  if (bottom < 0 || right < 0) throw std::invalid_argument("padding must be non-negative");
  if (bottom == 0 && right == 0) return x;
  const Shape& s = x.shape();
  const std::int64_t h = s[3], w = s[4], oh = h + bottom, ow = w + right;
  const std::int64_t planes = s[0] * s[1] * s[2];
  std::vector<float> out(static_cast<std::size_t>(planes * oh * ow));
  const auto src = x.data();
  for (std::int64_t p = 0; p < planes; ++p)
    for (std::int64_t y = 0; y < oh; ++y) {
      const std::int64_t sy = reflect_index(y, h);
      for (std::int64_t xx = 0; xx < ow; ++xx) out[static_cast<std::size_t>((p * oh + y) * ow + xx)] = src[(p * h + sy) * w + reflect_index(xx, w)];
    }
  return Tensor::from_data({s[0], s[1], s[2], oh, ow}, std::move(out));
}

Tensor crop_spatial(const Tensor& x, std::int64_t height, std::int64_t width) {
  const Shape& s = x.shape();
  if (s.size() != 5) throw DimensionError("rank", "crop_spatial expects (B, C, T, H, W)");
  if (height > s[3]) throw DimensionError("height", "crop larger than the tensor");
  if (width > s[4]) throw DimensionError("width", "crop larger than the tensor");
  if (height == s[3] && width == s[4]) return x;
  const std::int64_t planes = s[0] * s[1] * s[2];
  std::vector<float> out(static_cast<std::size_t>(planes * height * width));
  const auto src = x.data();
  for (std::int64_t p = 0; p < planes; ++p)
    for (std::int64_t y = 0; y < height; ++y)
      std::copy_n(src.begin() + (p * s[3] + y) * s[4], width, out.begin() + (p * height + y) * width);
  return Tensor::from_data({s[0], s[1], s[2], height, width}, std::move(out));
}

InferenceResult run_inference(const RemasterModel& model, const Tensor& luma, const Tensor& refs,
                              const InferenceOptions& opt) {
  check_clip(luma);
  NoGradGuard guard;
  const ForwardContext ctx{.training = false};
  const std::int64_t t = luma.dim(2), h = luma.dim(3), w = luma.dim(4);
  InferenceResult r;
  r.pad_bottom = pad_to(h, 16);
  r.pad_right = pad_to(w, 16);
  r.chunks = plan_chunks(t, opt.chunk, opt.overlap);
  const Tensor x = reflect_pad(luma, r.pad_bottom, r.pad_right);
  const Tensor z = padded_refs(refs);
  const std::int64_t hp = h + r.pad_bottom, wp = w + r.pad_right;

  std::vector<float> l(static_cast<std::size_t>(t * hp * wp)), ab;
  if (opt.color) ab.resize(static_cast<std::size_t>(2 * t * hp * wp));
  for (const Chunk& c : r.chunks) {
    const Tensor restored = model.preprocess().forward(slice_time(x, c.begin, c.end), ctx);
    keep_frames(restored, c, l, t);
    if (opt.color) keep_frames(model.srnet().forward(restored, z, ctx), c, ab, t);
  }
  r.luma = crop_spatial(Tensor::from_data({1, 1, t, hp, wp}, std::move(l)), h, w);
  if (opt.color) r.chroma = crop_spatial(Tensor::from_data({1, 2, t, hp, wp}, std::move(ab)), h, w);
  return r;
}

Tensor run_colorization(const RemasterModel& model, const Tensor& luma, const Tensor& refs,
                        const InferenceOptions& opt) {
  check_clip(luma);
  NoGradGuard guard;
  const ForwardContext ctx{.training = false};
  const std::int64_t t = luma.dim(2), h = luma.dim(3), w = luma.dim(4);
  const std::int64_t pb = pad_to(h, 16), pr = pad_to(w, 16);
  const Tensor x = reflect_pad(luma, pb, pr);
  const Tensor z = padded_refs(refs);
  std::vector<float> ab(static_cast<std::size_t>(2 * t * (h + pb) * (w + pr)));
  for (const Chunk& c : plan_chunks(t, opt.chunk, opt.overlap))
    keep_frames(model.srnet().forward(slice_time(x, c.begin, c.end), z, ctx), c, ab, t);
  return crop_spatial(Tensor::from_data({1, 2, t, h + pb, w + pr}, std::move(ab)), h, w);
}

}  // namespace remaster
