#include "lienc/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lienc/error.hpp"

namespace lienc {

std::vector<double> SsimParams::taps() const {
  std::vector<double> g(static_cast<std::size_t>(window));
  const double center = (window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - center;
    g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (auto& v : g) v /= sum;
  return g;
}

namespace {

void check_pair(const Image& a, const Image& b) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                                  " vs " + std::to_string(b.width()) + "x" +
                                                  std::to_string(b.height()));
  }
}

// Separable "valid" Gaussian filter of a W x H plane.
std::vector<double> filter_valid(const std::vector<double>& plane, int w, int h, const std::vector<double>& taps) {
  const int k = static_cast<int>(taps.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += taps[i] * plane[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) s += taps[i] * rows[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

}  // namespace

double ssim_channel(const Image& a, const Image& b, int channel, const SsimParams& p) {
  check_pair(a, b);
  if (a.width() < p.window || a.height() < p.window) {
    throw Error(ErrorCode::TooSmall, "SSIM needs images of at least " + std::to_string(p.window) + "x" +
                                         std::to_string(p.window));
  }
  const int w = a.width();
  const int h = a.height();
  const std::size_t n = a.pixel_count();
  std::vector<double> pa(n), pb(n), aa(n), bb(n), ab(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      pa[i] = a.at(x, y, channel);
      pb[i] = b.at(x, y, channel);
      aa[i] = pa[i] * pa[i];
      bb[i] = pb[i] * pb[i];
      ab[i] = pa[i] * pb[i];
    }
  }
  const auto taps = p.taps();
  const auto mu_a = filter_valid(pa, w, h, taps);
  const auto mu_b = filter_valid(pb, w, h, taps);
  const auto e_aa = filter_valid(aa, w, h, taps);
  const auto e_bb = filter_valid(bb, w, h, taps);
  const auto e_ab = filter_valid(ab, w, h, taps);

  const double c1 = p.c1();
  const double c2 = p.c2();
  std::vector<double> scores(mu_a.size());
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = e_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (var_a + var_b + c2);
    scores[i] = num / den;
  }
  return mean_of(scores);
}

double ssim(const Image& a, const Image& b, const SsimParams& params) {
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) sum += ssim_channel(a, b, c, params);
  return sum / 3.0;
}

double mse(const Image& a, const Image& b) {
  check_pair(a, b);
  const auto xa = a.bytes();
  const auto xb = b.bytes();
  double sum = 0.0;
  for (std::size_t i = 0; i < xa.size(); ++i) {
    const double d = static_cast<double>(xa[i]) - static_cast<double>(xb[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(xa.size());
}

double psnr(const Image& a, const Image& b) {
  const double m = mse(a, b);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

double mean_of(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyList, "cannot average an empty list");
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return (sum + comp) / static_cast<double>(values.size());
}

double average_over(std::span<const std::pair<Image, Image>> pairs, const ImageMetric& metric) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyList, "cannot average over zero pairs");
  std::vector<double> values;
  values.reserve(pairs.size());
  for (const auto& [a, b] : pairs) values.push_back(metric(a, b));
  return mean_of(values);
}

}  // namespace lienc
