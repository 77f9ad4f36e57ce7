#include "json.hpp"
#include "remaster/degrade.hpp"
#include "remaster/errors.hpp"

namespace remaster {

DegradeRecipe draw_recipe(std::uint64_t seed, const RecipeOptions& opt) {
  const AugmentTable& t = opt.table;
  Rng rng(seed);
  DegradeRecipe r;
  r.seed = seed;
  r.crop_size = opt.crop_size;
  r.frames = opt.frames;

  // Every draw is made whether or not it is used, so the stream layout does
  // not depend on earlier outcomes.
  r.flip = rng.bernoulli(t.flip_p);
  r.scale_edge = rng.uniform(t.scale_lo, t.scale_hi);
  r.crop_y = rng.uniform();
  r.crop_x = rng.uniform();
  r.rotation = rng.uniform(-t.rotation_deg, t.rotation_deg);
  if (!opt.joint_geometry) {
    r.flip = false;
    r.crop_y = r.crop_x = 0.5;
    r.rotation = 0;
  }
  r.brightness = rng.bernoulli(t.brightness_p);
  r.brightness_factor = rng.uniform(t.brightness_lo, t.brightness_hi);
  r.contrast = rng.bernoulli(t.contrast_p);
  r.contrast_factor = rng.uniform(t.contrast_lo, t.contrast_hi);

  r.jpeg = rng.bernoulli(t.jpeg_p);
  r.jpeg_quality = rng.uniform(t.jpeg_lo, t.jpeg_hi);
  r.noise = rng.bernoulli(t.noise_p);
  r.noise_std = t.noise_std;
  r.noise_seed = rng.next_u64();
  r.blur = rng.bernoulli(t.blur_p);
  r.blur_factor = rng.uniform(t.blur_lo, t.blur_hi);
  r.x_contrast = rng.bernoulli(t.x_contrast_p);
  r.x_contrast_factor = rng.uniform(t.x_contrast_lo, t.x_contrast_hi);

  r.deteriorate = opt.bank_size > 0;
  if (r.deteriorate) {
    r.frame_noise.resize(static_cast<std::size_t>(opt.frames));
    for (auto& layers : r.frame_noise) {
      const std::int64_t n = rng.uniform_int(t.layers_lo, t.layers_hi);
      for (std::int64_t i = 0; i < n; ++i) {
        NoiseLayerDraw d;
        d.bank_index = rng.uniform_int(0, static_cast<std::int64_t>(opt.bank_size) - 1);
        d.edge = rng.uniform(t.noise_scale_lo, t.noise_scale_hi);
        d.flip_h = rng.bernoulli(t.noise_flip_p);
        d.flip_v = rng.bernoulli(t.noise_flip_p);
        d.rotation = rng.uniform(-t.noise_rotation_deg, t.noise_rotation_deg);
        d.crop_y = rng.uniform();
        d.crop_x = rng.uniform();
        d.amplitude = rng.uniform(t.amplitude_lo, t.amplitude_hi);
        d.sign = rng.bernoulli(0.5) ? 1 : -1;
        layers.push_back(d);
      }
    }
  }

  r.references.resize(opt.references);
  for (auto& z : r.references) {
    z.flip = rng.bernoulli(t.flip_p);
    z.edge = rng.uniform(t.ref_scale_lo, t.ref_scale_hi);
    z.crop_y = rng.uniform();
    z.crop_x = rng.uniform();
    z.jpeg = rng.bernoulli(t.jpeg_p);
    z.jpeg_quality = rng.uniform(t.jpeg_lo, t.jpeg_hi);
    z.noise = rng.bernoulli(t.noise_p);
    z.noise_seed = rng.next_u64();
    z.saturation = rng.bernoulli(t.saturation_p);
    z.saturation_factor = rng.uniform(t.saturation_lo, t.saturation_hi);
  }
  return r;
}

DegradeRecipe identity_recipe(std::int64_t crop_size, std::int64_t frames, std::size_t references) {
  DegradeRecipe r;
  r.crop_size = crop_size;
  r.frames = frames;
  r.scale_edge = 256;
  r.crop_y = r.crop_x = 0.5;
  r.references.resize(references);
  for (auto& z : r.references) {
    z.edge = 256;
    z.crop_y = z.crop_x = 0.5;
  }
  return r;
}

using nlohmann::json;

void to_json(json& j, const NoiseLayerDraw& d) {
  j = json{{"bank_index", d.bank_index}, {"edge", d.edge},         {"flip_h", d.flip_h},
           {"flip_v", d.flip_v},         {"rotation", d.rotation}, {"crop_y", d.crop_y},
           {"crop_x", d.crop_x},         {"amplitude", d.amplitude}, {"sign", d.sign}};
}

void from_json(const json& j, NoiseLayerDraw& d) {
  j.at("bank_index").get_to(d.bank_index);
  j.at("edge").get_to(d.edge);
  j.at("flip_h").get_to(d.flip_h);
  j.at("flip_v").get_to(d.flip_v);
  j.at("rotation").get_to(d.rotation);
  j.at("crop_y").get_to(d.crop_y);
  j.at("crop_x").get_to(d.crop_x);
  j.at("amplitude").get_to(d.amplitude);
  j.at("sign").get_to(d.sign);
}

void to_json(json& j, const ReferenceDraw& z) {
  j = json{{"flip", z.flip},
           {"edge", z.edge},
           {"crop_y", z.crop_y},
           {"crop_x", z.crop_x},
           {"jpeg", z.jpeg},
           {"jpeg_quality", z.jpeg_quality},
           {"noise", z.noise},
           {"noise_seed", z.noise_seed},
           {"saturation", z.saturation},
           {"saturation_factor", z.saturation_factor}};
}

void from_json(const json& j, ReferenceDraw& z) {
  j.at("flip").get_to(z.flip);
  j.at("edge").get_to(z.edge);
  j.at("crop_y").get_to(z.crop_y);
  j.at("crop_x").get_to(z.crop_x);
  j.at("jpeg").get_to(z.jpeg);
  j.at("jpeg_quality").get_to(z.jpeg_quality);
  j.at("noise").get_to(z.noise);
  j.at("noise_seed").get_to(z.noise_seed);
  j.at("saturation").get_to(z.saturation);
  j.at("saturation_factor").get_to(z.saturation_factor);
}

std::string DegradeRecipe::to_json() const {
  json j{{"schema", 1},
         {"seed", seed},
         {"crop_size", crop_size},
         {"frames", frames},
         {"flip", flip},
         {"scale_edge", scale_edge},
         {"crop_y", crop_y},
         {"crop_x", crop_x},
         {"rotation", rotation},
         {"brightness", brightness},
         {"brightness_factor", brightness_factor},
         {"contrast", contrast},
         {"contrast_factor", contrast_factor},
         {"jpeg", jpeg},
         {"jpeg_quality", jpeg_quality},
         {"noise", noise},
         {"noise_std", noise_std},
         {"noise_seed", noise_seed},
         {"blur", blur},
         {"blur_factor", blur_factor},
         {"x_contrast", x_contrast},
         {"x_contrast_factor", x_contrast_factor},
         {"deteriorate", deteriorate},
         {"frame_noise", frame_noise},
         {"references", references}};
  return j.dump(2);
}

DegradeRecipe DegradeRecipe::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("schema").get<int>() != 1) throw DataError("unsupported recipe schema");
    DegradeRecipe r;
    j.at("seed").get_to(r.seed);
    j.at("crop_size").get_to(r.crop_size);
    j.at("frames").get_to(r.frames);
    j.at("flip").get_to(r.flip);
    j.at("scale_edge").get_to(r.scale_edge);
    j.at("crop_y").get_to(r.crop_y);
    j.at("crop_x").get_to(r.crop_x);
    j.at("rotation").get_to(r.rotation);
    j.at("brightness").get_to(r.brightness);
    j.at("brightness_factor").get_to(r.brightness_factor);
    j.at("contrast").get_to(r.contrast);
    j.at("contrast_factor").get_to(r.contrast_factor);
    j.at("jpeg").get_to(r.jpeg);
    j.at("jpeg_quality").get_to(r.jpeg_quality);
    j.at("noise").get_to(r.noise);
    j.at("noise_std").get_to(r.noise_std);
    j.at("noise_seed").get_to(r.noise_seed);
    j.at("blur").get_to(r.blur);
    j.at("blur_factor").get_to(r.blur_factor);
    j.at("x_contrast").get_to(r.x_contrast);
    j.at("x_contrast_factor").get_to(r.x_contrast_factor);
    j.at("deteriorate").get_to(r.deteriorate);
    j.at("frame_noise").get_to(r.frame_noise);
    j.at("references").get_to(r.references);
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed recipe JSON: ") + e.what());
  }
}

}  // namespace remaster
