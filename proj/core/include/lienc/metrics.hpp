#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "lienc/image.hpp"

namespace lienc {

/// Gaussian-window SSIM settings. Defaults follow the original SSIM
/// definition: 11x11 window, sigma 1.5, K1 = 0.01, K2 = 0.03, range 255.
struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  double c1() const noexcept { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const noexcept { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  /// Normalized 1-D Gaussian taps; the 2-D window is their outer product.
  std::vector<double> taps() const;
};

/// Mean SSIM over valid window positions, per channel, averaged over R,G,B.
double ssim(const Image& a, const Image& b, const SsimParams& params = {});
/// Single channel of ssim().
double ssim_channel(const Image& a, const Image& b, int channel, const SsimParams& params = {});

double mse(const Image& a, const Image& b);
/// 10 log10(255^2 / mse); +inf for identical images.
double psnr(const Image& a, const Image& b);

/// Neumaier-compensated mean; throws EmptyList.
double mean_of(std::span<const double> values);

using ImageMetric = std::function<double(const Image&, const Image&)>;
double average_over(std::span<const std::pair<Image, Image>> pairs, const ImageMetric& metric);

}  // namespace lienc
