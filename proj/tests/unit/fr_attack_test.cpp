#include <gtest/gtest.h>

#include "desk_data.hpp"
#include "lienc/error.hpp"
#include "lienc/fr_attack.hpp"
#include "lienc/pixelwise.hpp"

namespace lienc {
namespace {

TEST(FrAttack, FoldsOntoChosenHalf) {
  Image img(2, 1, {0, 127, 128, 255, 10, 200});
  const Image up = fr_attack(img, {8, 1});
  EXPECT_EQ(up.pixel(0, 0), (Rgb{255, 128, 128}));
  EXPECT_EQ(up.pixel(1, 0), (Rgb{255, 245, 200}));
  const Image down = fr_attack(img, {8, 0});
  EXPECT_EQ(down.pixel(0, 0), (Rgb{0, 127, 127}));
  EXPECT_EQ(down.pixel(1, 0), (Rgb{0, 10, 55}));
}

TEST(FrAttack, LowerBitCount) {
  Image img(1, 1, {0b1010'0101, 0b0000'1000, 0b1111'0111});
  const Image out = fr_attack(img, {4, 0});
  EXPECT_EQ(out.pixel(0, 0), (Rgb{0b1010'0101, 0b0000'0111, 0b1111'0111}));
}

TEST(FrAttack, PostconditionAndIdempotence) {
  const Image img = testing::random_image(32, 32, 4);
  for (int L = 1; L <= 8; ++L) {
    for (int b = 0; b <= 1; ++b) {
      const Image out = fr_attack(img, {L, b});
      for (auto v : out.bytes()) ASSERT_EQ((v >> (L - 1)) & 1, b);
      EXPECT_EQ(fr_attack(out, {L, b}), out);
    }
  }
}

TEST(FrAttack, UndoesNegativePositiveUpToSign) {
  // Without color shuffle the two variants recover p or 255 - p per channel.
  const Image& plain = testing::natural96()[0];
  const Image enc = encrypt_pixelwise(plain, PixelwiseKey{1, 2, 3, 0});
  const Image fr = fr_attack(enc, {8, 1});
  const Image ref = fr_attack(plain, {8, 1});
  const auto mat = expand_pixelwise_key(PixelwiseKey{1, 2, 3, 0}, 96, 96);
  for (int y = 0; y < 96; ++y)
    for (int x = 0; x < 96; ++x) {
      const auto idx = mat.perm_index[static_cast<std::size_t>(y) * 96 + x];
      for (int k = 0; k < 3; ++k)
        ASSERT_EQ(fr.at(x, y, k), ref.at(x, y, kColorPermutations[idx][k]));
    }
}

TEST(FrAttack, InvalidParams) {
  const Image img(1, 1);
  EXPECT_THROW(fr_attack(img, {0, 1}), Error);
  EXPECT_THROW(fr_attack(img, {9, 1}), Error);
  EXPECT_THROW(fr_attack(img, {8, 2}), Error);
}

TEST(FrAttack, Sweep) {
  const Image img = testing::random_image(5, 5, 1);
  const auto [zero, one] = fr_attack_sweep(img);
  EXPECT_EQ(zero, fr_attack(img, {8, 0}));
  EXPECT_EQ(one, fr_attack(img, {8, 1}));
}

}  // namespace
}  // namespace lienc
