#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "desk_data.hpp"
#include "lienc/error.hpp"
#include "lienc/keystream.hpp"
#include "lienc/metrics.hpp"
#include "reference_ssim.hpp"

namespace lienc {
namespace {

Image negative(const Image& img) {
  Image out = img;
  for (auto& b : out.bytes()) b = static_cast<std::uint8_t>(255 - b);
  return out;
}

TEST(Ssim, WindowTaps) {
  const auto taps = SsimParams{}.taps();
  ASSERT_EQ(taps.size(), 11u);
  double s = 0;
  for (double t : taps) s += t;
  EXPECT_NEAR(s, 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(SsimParams{}.c1(), 6.5025);
  EXPECT_DOUBLE_EQ(SsimParams{}.c2(), 58.5225);
}

TEST(Ssim, IdenticalIsExactlyOne) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Image img = testing::random_image(20, 13, s);
    EXPECT_EQ(ssim(img, img), 1.0);
  }
  const Image& nat = testing::natural96()[3];
  EXPECT_EQ(ssim(nat, nat), 1.0);
  Image flat(12, 12);
  EXPECT_EQ(ssim(flat, flat), 1.0);
}

TEST(Ssim, MatchesReferenceOnRandomPairs) {
  KeyStream ks(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 11 + static_cast<int>(ks.next_bounded(20));
    const int h = 11 + static_cast<int>(ks.next_bounded(20));
    const Image a = testing::random_image(w, h, ks.next_u64());
    Image b = testing::random_image(w, h, ks.next_u64());
    // Blend so the pairs span weak to strong similarity.
    const double t = ks.next_unit();
    for (std::size_t i = 0; i < b.bytes().size(); ++i) {
      b.bytes()[i] = static_cast<std::uint8_t>(std::lround(t * a.bytes()[i] + (1 - t) * b.bytes()[i]));
    }
    EXPECT_NEAR(ssim(a, b), testing::reference_ssim(a, b), 1e-6);
  }
}

TEST(Ssim, NegativeOfNaturalImage) {
  const Image& img = testing::natural96()[0];
  const double v = ssim(img, negative(img));
  EXPECT_NEAR(v, testing::reference_ssim(img, negative(img)), 1e-6);
  EXPECT_LT(v, -0.1);
}

TEST(Ssim, IndependentNoiseNearZero) {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const double v = ssim(testing::random_image(64, 64, 2 * s), testing::random_image(64, 64, 2 * s + 1));
    worst = std::max(worst, std::abs(v));
  }
  EXPECT_LT(worst, 0.05);
}

TEST(Ssim, SymmetricAndBounded) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Image a = testing::natural96()[s];
    const Image b = testing::natural96()[s + 10];
    const double ab = ssim(a, b);
    EXPECT_NEAR(ab, ssim(b, a), 1e-12);
    EXPECT_LE(ab, 1.0);
    EXPECT_GE(ab, -1.0);
  }
}

TEST(Ssim, Errors) {
  EXPECT_THROW(ssim(Image(10, 20), Image(10, 20)), Error);
  EXPECT_THROW(ssim(Image(12, 12), Image(13, 12)), Error);
}

TEST(Mse, Basics) {
  const Image a = testing::random_image(9, 9, 1);
  const Image b = testing::random_image(9, 9, 2);
  EXPECT_EQ(mse(a, a), 0.0);
  EXPECT_EQ(mse(a, b), mse(b, a));
  Image black(1, 1);
  Image white(1, 1, {255, 255, 255});
  EXPECT_EQ(mse(black, white), 65025.0);
  EXPECT_NEAR(psnr(black, white), 0.0, 1e-12);
  EXPECT_TRUE(std::isinf(psnr(a, a)));
  EXPECT_THROW(mse(a, Image(9, 8)), Error);
}

TEST(AverageOver, Contract) {
  std::vector<std::pair<Image, Image>> pairs;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const Image img = testing::random_image(16, 16, s);
    pairs.emplace_back(img, img);
  }
  EXPECT_EQ(average_over(pairs, [](const Image& a, const Image& b) { return ssim(a, b); }), 1.0);
  std::vector<std::pair<Image, Image>> none;
  EXPECT_THROW(average_over(none, mse), Error);
}

TEST(AverageOver, OrderIndependent) {
  KeyStream ks(5);
  std::vector<double> v(1000);
  for (auto& x : v) x = (ks.next_unit() - 0.5) * std::pow(10.0, static_cast<double>(ks.next_bounded(12)));
  const double m0 = mean_of(v);
  for (int t = 0; t < 10; ++t) {
    const auto perm = ks.permutation(v.size());
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) w[i] = v[perm[i]];
    EXPECT_NEAR(mean_of(w), m0, 1e-12 * std::max(1.0, std::abs(m0)));
  }
  EXPECT_EQ(mean_of(std::vector<double>{0.25}), 0.25);
}

}  // namespace
}  // namespace lienc
