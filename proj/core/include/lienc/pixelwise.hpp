#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "lienc/image.hpp"
#include "lienc/keyspace.hpp"

namespace lienc {

/// Seeds for the three per-channel negative-positive keys and the
/// color-shuffle key.
struct PixelwiseKey {
  std::uint64_t seed_r = 0;
  std::uint64_t seed_g = 0;
  std::uint64_t seed_b = 0;
  std::uint64_t seed_cs = 0;

  friend bool operator==(const PixelwiseKey&, const PixelwiseKey&) = default;
};

struct SameKey {
  PixelwiseKey key;
};
struct DifferentKeys {
  std::uint64_t master = 0;
};

/// Same key for every image, or one derived key per image index.
class KeyPolicy {
 public:
  KeyPolicy(SameKey same) : mode_(same) {}
  KeyPolicy(DifferentKeys different) : mode_(different) {}

  bool is_same_key() const noexcept { return std::holds_alternative<SameKey>(mode_); }
  PixelwiseKey key_for(std::size_t image_index) const;
  const std::variant<SameKey, DifferentKeys>& mode() const noexcept { return mode_; }

 private:
  std::variant<SameKey, DifferentKeys> mode_;
};

/// Fully expanded key material for one image size: one NP bit per pixel per
/// channel plus one color-permutation index per pixel, all row-major.
struct PixelwiseKeyMaterial {
  int width = 0;
  int height = 0;
  std::array<std::vector<std::uint8_t>, 3> np_bits;
  std::vector<std::uint8_t> perm_index;
};

using NpBitPlanes = std::array<std::vector<std::uint8_t>, 3>;

NpBitPlanes expand_np_bits(const PixelwiseKey& key, int width, int height);
PixelwiseKeyMaterial expand_pixelwise_key(const PixelwiseKey& key, int width, int height);

/// bit 0 keeps p, bit 1 maps p to 255 - p.
constexpr std::uint8_t np_transform(std::uint8_t p, int bit) noexcept {
  return bit ? static_cast<std::uint8_t>(255 - p) : p;
}

/// Source-channel orderings, lexicographic: RGB, RBG, GRB, GBR, BRG, BGR.
inline constexpr std::array<std::array<int, 3>, 6> kColorPermutations{{
    {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

Rgb shuffle_colors(Rgb pixel, int perm_index);
Rgb unshuffle_colors(Rgb pixel, int perm_index);

Image encrypt_pixelwise(const Image& img, const PixelwiseKey& key);
Image decrypt_pixelwise(const Image& img, const PixelwiseKey& key);
Image encrypt_pixelwise(const Image& img, const PixelwiseKeyMaterial& material);
Image decrypt_pixelwise(const Image& img, const PixelwiseKeyMaterial& material);

PixelwiseKey derive_image_key(std::uint64_t master, std::size_t index);

}  // namespace lienc
