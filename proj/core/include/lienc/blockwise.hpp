#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "lienc/image.hpp"
#include "lienc/keyspace.hpp"

namespace lienc {

/// 4x4 blocks, each split into 6 nibble channels: 96 keyed positions.
struct BlockGeometry {
  static constexpr int kWidth = 4;
  static constexpr int kHeight = 4;
  static constexpr int kPixels = kWidth * kHeight;
  static constexpr int kChannels = 6;
  static constexpr int kPositions = kPixels * kChannels;
};
static_assert(BlockGeometry::kPositions == 96);

/// Channel layout: 0..2 = R,G,B upper nibbles, 3..5 = R,G,B lower nibbles.
/// Flat position j = channel * 16 + y * 4 + x.
using NibbleBlock = std::array<std::uint8_t, BlockGeometry::kPositions>;
using PixelBlock = std::array<Rgb, BlockGeometry::kPixels>;  // row-major
using InversionBits = std::array<std::uint8_t, BlockGeometry::kPositions>;
using PositionPermutation = std::array<std::uint8_t, BlockGeometry::kPositions>;

constexpr int nibble_index(int channel, int x, int y) noexcept {
  return channel * BlockGeometry::kPixels + y * BlockGeometry::kWidth + x;
}

struct BlockwiseKey {
  std::uint64_t seed_inv = 0;
  std::uint64_t seed_shf = 0;

  friend bool operator==(const BlockwiseKey&, const BlockwiseKey&) = default;
};

/// Expanded key: 96 inversion bits and one permutation of the 96 positions,
/// shared by every block of every image under the key.
struct BlockwiseKeyMaterial {
  InversionBits inversion{};
  PositionPermutation permutation{};

  static BlockwiseKeyMaterial identity();
};

BlockwiseKeyMaterial expand_blockwise_key(const BlockwiseKey& key);

NibbleBlock split_nibbles(std::span<const Rgb> block);
NibbleBlock invert_intensities(const NibbleBlock& nibbles, std::span<const std::uint8_t> bits);
/// Output position i takes input position perm[i].
NibbleBlock shuffle_positions(const NibbleBlock& nibbles, std::span<const std::uint8_t> perm);
NibbleBlock unshuffle_positions(const NibbleBlock& nibbles, std::span<const std::uint8_t> perm);
PixelBlock merge_nibbles(const NibbleBlock& nibbles);

PixelBlock read_block(const Image& img, int block_x, int block_y);
void write_block(Image& img, int block_x, int block_y, const PixelBlock& block);

Image encrypt_blockwise(const Image& img, const BlockwiseKey& key);
Image decrypt_blockwise(const Image& img, const BlockwiseKey& key);
Image encrypt_blockwise(const Image& img, const BlockwiseKeyMaterial& material);
Image decrypt_blockwise(const Image& img, const BlockwiseKeyMaterial& material);

/// Throws DimensionNotMultipleOfBlock unless both sides are multiples of 4.
void check_block_dimensions(const Image& img);

}  // namespace lienc
