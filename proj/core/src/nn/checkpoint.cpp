#include "lienc/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "lienc/error.hpp"
#include "lienc/image.hpp"

namespace lienc::nn {

namespace {

constexpr char kMagic[4] = {'L', 'I', 'E', 'N'};

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void i32(std::int32_t v) { put(static_cast<std::uint32_t>(v), 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::int32_t i32() { return static_cast<std::int32_t>(static_cast<std::uint32_t>(get(4))); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  void expect_magic() {
    need(4);
    if (std::memcmp(in_.data() + pos_, kMagic, 4) != 0) throw Error(ErrorCode::BadCheckpoint, "bad magic");
    pos_ += 4;
  }
  bool at_end() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::BadCheckpoint, "truncated checkpoint");
  }
  std::uint64_t get(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> save_checkpoint(const Sequential& net, Codec codec) {
  Writer w;
  w.raw(kMagic, 4);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(codec));
  w.u32(static_cast<std::uint32_t>(net.size()));
  // parameters() is non-const; the copy keeps this function const-correct.
  Sequential copy = net;
  for (std::size_t i = 0; i < copy.size(); ++i) {
    auto& layer = copy.layer(i);
    const auto& s = layer.spec();
    w.u32(static_cast<std::uint32_t>(s.kind));
    for (int v : {s.in_channels, s.out_channels, s.kernel, s.stride, s.padding, s.height, s.width}) w.i32(v);
    w.f64(s.slope);
    const auto params = layer.parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const auto* p : params) {
      w.u32(static_cast<std::uint32_t>(p->value.rank()));
      for (auto d : p->value.shape()) w.u64(d);
      for (double v : p->value.data()) w.f64(v);
    }
  }
  return w.take();
}

Checkpoint load_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.expect_magic();
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::BadCheckpoint, "unsupported version " + std::to_string(version));
  }
  const auto codec = r.u32();
  if (codec > static_cast<std::uint32_t>(Codec::NibbleBlock)) {
    throw Error(ErrorCode::BadCheckpoint, "unknown codec " + std::to_string(codec));
  }
  Checkpoint ck;
  ck.codec = static_cast<Codec>(codec);
  const auto layers = r.u32();
  KeyStream unused(0);
  for (std::uint32_t li = 0; li < layers; ++li) {
    LayerSpec s;
    const auto kind = r.u32();
    if (kind < 1 || kind > 6) throw Error(ErrorCode::BadCheckpoint, "unknown layer kind " + std::to_string(kind));
    s.kind = static_cast<LayerKind>(kind);
    s.in_channels = r.i32();
    s.out_channels = r.i32();
    s.kernel = r.i32();
    s.stride = r.i32();
    s.padding = r.i32();
    s.height = r.i32();
    s.width = r.i32();
    s.slope = r.f64();
    std::unique_ptr<Layer> layer;
    try {
      layer = make_layer(s, Init::Identity, unused);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadCheckpoint, e.what());
    }
    auto params = layer->parameters();
    if (r.u32() != params.size()) throw Error(ErrorCode::BadCheckpoint, "parameter count mismatch");
    for (auto* p : params) {
      const auto rank = r.u32();
      Shape shape;
      for (std::uint32_t d = 0; d < rank; ++d) shape.push_back(static_cast<std::size_t>(r.u64()));
      if (shape != p->value.shape()) {
        throw Error(ErrorCode::BadCheckpoint, "parameter shape " + shape_string(shape) + " does not match layer " +
                                                  shape_string(p->value.shape()));
      }
      for (auto& v : p->value.data()) v = r.f64();
    }
    ck.net.add(std::move(layer));
  }
  if (!r.at_end()) throw Error(ErrorCode::BadCheckpoint, "trailing bytes");
  return ck;
}

void write_checkpoint_file(const std::filesystem::path& path, const Sequential& net, Codec codec) {
  const auto bytes = save_checkpoint(net, codec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Checkpoint read_checkpoint_file(const std::filesystem::path& path) {
  return load_checkpoint(read_file_bytes(path));
}

}  // namespace lienc::nn
