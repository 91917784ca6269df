#include "reference_ssim.hpp"

#include <cmath>

namespace lienc::testing {

double reference_ssim(const Image& a, const Image& b) {
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  double win[kWin][kWin];
  double total = 0.0;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      const double di = i - 5;
      const double dj = j - 5;
      win[i][j] = std::exp(-(di * di + dj * dj) / (2.0 * kSigma * kSigma));
      total += win[i][j];
    }
  }
  for (auto& row : win)
    for (double& v : row) v /= total;

  const double c1 = std::pow(0.01 * 255.0, 2);
  const double c2 = std::pow(0.03 * 255.0, 2);
  double channel_sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    double acc = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + kWin <= a.height(); ++y0) {
      for (int x0 = 0; x0 + kWin <= a.width(); ++x0) {
        double ma = 0.0, mb = 0.0;
        for (int i = 0; i < kWin; ++i)
          for (int j = 0; j < kWin; ++j) {
            ma += win[i][j] * a.at(x0 + j, y0 + i, c);
            mb += win[i][j] * b.at(x0 + j, y0 + i, c);
          }
        double va = 0.0, vb = 0.0, cov = 0.0;
        for (int i = 0; i < kWin; ++i)
          for (int j = 0; j < kWin; ++j) {
            const double da = a.at(x0 + j, y0 + i, c) - ma;
            const double db = b.at(x0 + j, y0 + i, c) - mb;
            va += win[i][j] * da * da;
            vb += win[i][j] * db * db;
            cov += win[i][j] * da * db;
          }
        acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
    channel_sum += acc / count;
  }
  return channel_sum / 3.0;
}

}  // namespace lienc::testing
