#include "lienc/pixelwise.hpp"

#include <string>

#include "lienc/error.hpp"
#include "lienc/keystream.hpp"

namespace lienc {

PixelwiseKey KeyPolicy::key_for(std::size_t image_index) const {
  if (const auto* same = std::get_if<SameKey>(&mode_)) return same->key;
  return derive_image_key(std::get<DifferentKeys>(mode_).master, image_index);
}

NpBitPlanes expand_np_bits(const PixelwiseKey& key, int width, int height) {
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (width < 1 || height < 1) throw Error(ErrorCode::DimensionMismatch, "empty image");
  const std::array<std::uint64_t, 3> seeds{key.seed_r, key.seed_g, key.seed_b};
  NpBitPlanes planes;
  for (int c = 0; c < 3; ++c) {
    KeyStream stream(seeds[c]);
    planes[c].resize(n);
    for (auto& bit : planes[c]) bit = static_cast<std::uint8_t>(stream.next_bit());
  }
  return planes;
}

PixelwiseKeyMaterial expand_pixelwise_key(const PixelwiseKey& key, int width, int height) {
  PixelwiseKeyMaterial m;
  m.width = width;
  m.height = height;
  m.np_bits = expand_np_bits(key, width, height);
  KeyStream cs(key.seed_cs);
  m.perm_index.resize(m.np_bits[0].size());
  for (auto& idx : m.perm_index) idx = static_cast<std::uint8_t>(cs.next_bounded(6));
  return m;
}

Rgb shuffle_colors(Rgb pixel, int perm_index) {
  if (perm_index < 0 || perm_index >= 6) {
    throw Error(ErrorCode::InvalidPermIndex, std::to_string(perm_index));
  }
  const auto& src = kColorPermutations[static_cast<std::size_t>(perm_index)];
  return {pixel[src[0]], pixel[src[1]], pixel[src[2]]};
}

Rgb unshuffle_colors(Rgb pixel, int perm_index) {
  if (perm_index < 0 || perm_index >= 6) {
    throw Error(ErrorCode::InvalidPermIndex, std::to_string(perm_index));
  }
  const auto& src = kColorPermutations[static_cast<std::size_t>(perm_index)];
  Rgb out{};
  for (int k = 0; k < 3; ++k) out[src[k]] = pixel[k];
  return out;
}

namespace {

void check_material(const Image& img, const PixelwiseKeyMaterial& m) {
  if (img.width() != m.width || img.height() != m.height) {
    throw Error(ErrorCode::DimensionMismatch, "key material expanded for " + std::to_string(m.width) +
                                                  "x" + std::to_string(m.height) + " but image is " +
                                                  std::to_string(img.width()) + "x" +
                                                  std::to_string(img.height()));
  }
}

}  // namespace

Image encrypt_pixelwise(const Image& img, const PixelwiseKeyMaterial& m) {
  check_material(img, m);
  Image out(img.width(), img.height());
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x, ++i) {
      Rgb p = img.pixel(x, y);
      for (int c = 0; c < 3; ++c) p[c] = np_transform(p[c], m.np_bits[c][i]);
      out.set_pixel(x, y, shuffle_colors(p, m.perm_index[i]));
    }
  }
  return out;
}

Image decrypt_pixelwise(const Image& img, const PixelwiseKeyMaterial& m) {
  check_material(img, m);
  Image out(img.width(), img.height());
  std::size_t i = 0;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x, ++i) {
      Rgb p = unshuffle_colors(img.pixel(x, y), m.perm_index[i]);
      for (int c = 0; c < 3; ++c) p[c] = np_transform(p[c], m.np_bits[c][i]);
      out.set_pixel(x, y, p);
    }
  }
  return out;
}

Image encrypt_pixelwise(const Image& img, const PixelwiseKey& key) {
  return encrypt_pixelwise(img, expand_pixelwise_key(key, img.width(), img.height()));
}

Image decrypt_pixelwise(const Image& img, const PixelwiseKey& key) {
  return decrypt_pixelwise(img, expand_pixelwise_key(key, img.width(), img.height()));
}

PixelwiseKey derive_image_key(std::uint64_t master, std::size_t index) {
  // Hash the tweaked master once so that neighbouring indices do not get
  // streams that are shifted copies of each other.
  const std::uint64_t tweak = master + KeyStream::kIncrement * (static_cast<std::uint64_t>(index) + 1);
  KeyStream stream(KeyStream(tweak).next_u64());
  PixelwiseKey key;
  key.seed_r = stream.next_u64();
  key.seed_g = stream.next_u64();
  key.seed_b = stream.next_u64();
  key.seed_cs = stream.next_u64();
  return key;
}

}  // namespace lienc
