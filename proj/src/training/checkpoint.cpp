#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "remaster/errors.hpp"
#include "remaster/training.hpp"

namespace remaster {

namespace {

constexpr char kMagic[4] = {'R', 'M', 'S', 'T'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t crc_of(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in pieces.
  while (n > 0) {
    const auto piece = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, piece);
    data += piece;
    n -= piece;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  Reader(const std::vector<std::uint8_t>& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string text(std::size_t n) {
    need(n);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  void floats(std::vector<float>& out, std::size_t n) {
    need(n * 4);
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::bit_cast<float>(u32());
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n) const {
    if (end_ - pos_ < n) throw CheckpointError("checkpoint is truncated");
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

}  // namespace

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

Checkpoint capture_checkpoint(const ParamStore& store) {
  Checkpoint c;
  for (const auto& e : store.entries())
    c.tensors.push_back({e.name, e.tensor.shape(), std::vector<float>(e.tensor.data().begin(), e.tensor.data().end())});
  return c;
}

void apply_checkpoint(const Checkpoint& ckpt, ParamStore& store) {
  for (const auto& e : store.entries()) {
    const CheckpointTensor* t = ckpt.find(e.name);
    if (!t) throw CheckpointError("checkpoint has no tensor " + e.name);
    if (t->shape != e.tensor.shape()) {
      throw CheckpointError("tensor " + e.name + " has shape " + shape_to_string(t->shape) + " in the checkpoint but " +
                            shape_to_string(e.tensor.shape()) + " in the model");
    }
  }
  for (const auto& e : store.entries()) {
    Tensor dst = e.tensor;
    const auto& src = ckpt.find(e.name)->data;
    std::copy(src.begin(), src.end(), dst.mutable_data().begin());
  }
}

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& ckpt) {
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_u32(out, Checkpoint::kVersion);
  put_u32(out, static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (static_cast<std::int64_t>(t.data.size()) != shape_numel(t.shape)) {
      throw CheckpointError("tensor " + t.name + " data does not match its shape");
    }
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.insert(out.end(), t.name.begin(), t.name.end());
    put_u32(out, static_cast<std::uint32_t>(t.shape.size()));
    for (auto d : t.shape) put_u32(out, static_cast<std::uint32_t>(d));
    out.reserve(out.size() + t.data.size() * 4 + 4);
    for (float v : t.data) put_u32(out, std::bit_cast<std::uint32_t>(v));
  }
  put_u32(out, crc_of(out.data(), out.size()));
  return out;
}

Checkpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 16) throw CheckpointError("checkpoint is truncated");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw CheckpointError("not a checkpoint file (bad magic)");
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(bytes[body + i]) << (8 * i);

  if (crc_of(bytes.data(), body) != stored) throw CheckpointError("checkpoint CRC mismatch (file is corrupt)");
  Reader in(bytes, body);
  in.text(4);
  const std::uint32_t version = in.u32();
  if (version != Checkpoint::kVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint c;
  const std::uint32_t count = in.u32();
  for (std::uint32_t k = 0; k < count; ++k) {
    CheckpointTensor t;
    t.name = in.text(in.u32());
    const std::uint32_t rank = in.u32();
    if (rank > 8) throw CheckpointError("tensor " + t.name + " has implausible rank " + std::to_string(rank));
    for (std::uint32_t i = 0; i < rank; ++i) t.shape.push_back(in.u32());
    in.floats(t.data, static_cast<std::size_t>(shape_numel(t.shape)));
    c.tensors.push_back(std::move(t));
  }
  if (in.pos() != body) throw CheckpointError("checkpoint has trailing bytes before its CRC");
  return c;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(ckpt);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw CheckpointError("cannot write checkpoint " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw CheckpointError("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return deserialize_checkpoint(bytes);
}

NetworkConfig network_config_from(const Checkpoint& ckpt) {
  const CheckpointTensor* t = ckpt.find("sr.src16.conv1.weight");
  if (!t || t->shape.empty()) throw CheckpointError("checkpoint is missing sr.src16.conv1.weight");
  const int div = infer_width_divisor(t->shape[0]);
  if (div == 0) throw CheckpointError("cannot infer network width from " + std::to_string(t->shape[0]) + " channels");
  NetworkConfig cfg;
  cfg.width_divisor = div;
  return cfg;
}

}  // namespace remaster
