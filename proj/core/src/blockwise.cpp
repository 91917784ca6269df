#include "lienc/blockwise.hpp"

#include <numeric>
#include <string>

#include "lienc/error.hpp"
#include "lienc/keystream.hpp"

namespace lienc {

namespace {

constexpr int kN = BlockGeometry::kPositions;

void check_permutation(std::span<const std::uint8_t> perm) {
  if (perm.size() != kN) {
    throw Error(ErrorCode::NotAPermutation, "expected 96 entries, got " + std::to_string(perm.size()));
  }
  std::array<bool, kN> seen{};
  for (auto p : perm) {
    if (p >= kN || seen[p]) throw Error(ErrorCode::NotAPermutation, "entry " + std::to_string(p));
    seen[p] = true;
  }
}

}  // namespace

BlockwiseKeyMaterial BlockwiseKeyMaterial::identity() {
  BlockwiseKeyMaterial m;
  std::iota(m.permutation.begin(), m.permutation.end(), std::uint8_t{0});
  return m;
}

BlockwiseKeyMaterial expand_blockwise_key(const BlockwiseKey& key) {
  BlockwiseKeyMaterial m;
  KeyStream inv(key.seed_inv);
  for (auto& bit : m.inversion) bit = static_cast<std::uint8_t>(inv.next_bit());
  KeyStream shf(key.seed_shf);
  const auto perm = shf.permutation(kN);
  for (int i = 0; i < kN; ++i) m.permutation[i] = static_cast<std::uint8_t>(perm[i]);
  return m;
}

NibbleBlock split_nibbles(std::span<const Rgb> block) {
  if (block.size() != BlockGeometry::kPixels) {
    throw Error(ErrorCode::BadBlockShape, "expected 16 pixels, got " + std::to_string(block.size()));
  }
  NibbleBlock out{};
  for (int pos = 0; pos < BlockGeometry::kPixels; ++pos) {
    for (int c = 0; c < 3; ++c) {
      const std::uint8_t v = block[pos][c];
      out[c * BlockGeometry::kPixels + pos] = static_cast<std::uint8_t>(v >> 4);
      out[(c + 3) * BlockGeometry::kPixels + pos] = static_cast<std::uint8_t>(v & 0x0F);
    }
  }
  return out;
}

NibbleBlock invert_intensities(const NibbleBlock& nibbles, std::span<const std::uint8_t> bits) {
  if (bits.size() != kN) {
    throw Error(ErrorCode::BadKeyLength, "expected 96 bits, got " + std::to_string(bits.size()));
  }
  NibbleBlock out = nibbles;
  for (int j = 0; j < kN; ++j) {
    if (bits[j]) out[j] = static_cast<std::uint8_t>(15 - out[j]);
  }
  return out;
}

NibbleBlock shuffle_positions(const NibbleBlock& nibbles, std::span<const std::uint8_t> perm) {
  check_permutation(perm);
  NibbleBlock out{};
  for (int i = 0; i < kN; ++i) out[i] = nibbles[perm[i]];
  return out;
}

NibbleBlock unshuffle_positions(const NibbleBlock& nibbles, std::span<const std::uint8_t> perm) {
  check_permutation(perm);
  NibbleBlock out{};
  for (int i = 0; i < kN; ++i) out[perm[i]] = nibbles[i];
  return out;
}

PixelBlock merge_nibbles(const NibbleBlock& nibbles) {
  PixelBlock out{};
  for (int pos = 0; pos < BlockGeometry::kPixels; ++pos) {
    for (int c = 0; c < 3; ++c) {
      const int upper = nibbles[c * BlockGeometry::kPixels + pos];
      const int lower = nibbles[(c + 3) * BlockGeometry::kPixels + pos];
      if (upper > 15 || lower > 15) {
        throw Error(ErrorCode::NibbleOutOfRange, "nibble value above 15 at pixel " + std::to_string(pos));
      }
      out[pos][c] = static_cast<std::uint8_t>(16 * upper + lower);
    }
  }
  return out;
}

PixelBlock read_block(const Image& img, int block_x, int block_y) {
  PixelBlock block{};
  for (int y = 0; y < BlockGeometry::kHeight; ++y) {
    for (int x = 0; x < BlockGeometry::kWidth; ++x) {
      block[y * BlockGeometry::kWidth + x] =
          img.pixel(block_x * BlockGeometry::kWidth + x, block_y * BlockGeometry::kHeight + y);
    }
  }
  return block;
}

void write_block(Image& img, int block_x, int block_y, const PixelBlock& block) {
  for (int y = 0; y < BlockGeometry::kHeight; ++y) {
    for (int x = 0; x < BlockGeometry::kWidth; ++x) {
      img.set_pixel(block_x * BlockGeometry::kWidth + x, block_y * BlockGeometry::kHeight + y,
                    block[y * BlockGeometry::kWidth + x]);
    }
  }
}

void check_block_dimensions(const Image& img) {
  if (img.width() % BlockGeometry::kWidth != 0 || img.height() % BlockGeometry::kHeight != 0) {
    throw Error(ErrorCode::DimensionNotMultipleOfBlock,
                std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                    " is not a multiple of 4x4");
  }
}

Image encrypt_blockwise(const Image& img, const BlockwiseKeyMaterial& m) {
  check_block_dimensions(img);
  Image out(img.width(), img.height());
  for (int by = 0; by < img.height() / BlockGeometry::kHeight; ++by) {
    for (int bx = 0; bx < img.width() / BlockGeometry::kWidth; ++bx) {
      const auto nibbles = split_nibbles(read_block(img, bx, by));
      const auto mixed = shuffle_positions(invert_intensities(nibbles, m.inversion), m.permutation);
      write_block(out, bx, by, merge_nibbles(mixed));
    }
  }
  return out;
}

Image decrypt_blockwise(const Image& img, const BlockwiseKeyMaterial& m) {
  check_block_dimensions(img);
  Image out(img.width(), img.height());
  for (int by = 0; by < img.height() / BlockGeometry::kHeight; ++by) {
    for (int bx = 0; bx < img.width() / BlockGeometry::kWidth; ++bx) {
      const auto nibbles = split_nibbles(read_block(img, bx, by));
      const auto plain = invert_intensities(unshuffle_positions(nibbles, m.permutation), m.inversion);
      write_block(out, bx, by, merge_nibbles(plain));
    }
  }
  return out;
}

Image encrypt_blockwise(const Image& img, const BlockwiseKey& key) {
  return encrypt_blockwise(img, expand_blockwise_key(key));
}

Image decrypt_blockwise(const Image& img, const BlockwiseKey& key) {
  return decrypt_blockwise(img, expand_blockwise_key(key));
}

}  // namespace lienc
