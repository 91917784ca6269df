#include "lienc/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "lienc/error.hpp"

namespace lienc::nn {

LossResult loss_mse(const Tensor& pred, const Tensor& target) {
  expect_shape(target, pred.shape(), "loss_mse target");
  const double n = static_cast<double>(pred.size());
  LossResult r{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.value += d * d;
    r.grad[i] = 2.0 * d / n;
  }
  r.value /= n;
  return r;
}

ScalarLoss loss_bce(double pred, int label) {
  const double p = std::clamp(pred, kBceClamp, 1.0 - kBceClamp);
  // The derivative follows the clamped value so that the extremes stay finite.
  if (label) return {-std::log(p), -1.0 / p};
  return {-std::log(1.0 - p), 1.0 / (1.0 - p)};
}

LossResult loss_bce(const Tensor& pred, int label) {
  const double n = static_cast<double>(pred.size());
  LossResult r{0.0, Tensor(pred.shape())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const auto l = loss_bce(pred[i], label);
    r.value += l.value;
    r.grad[i] = l.grad / n;
  }
  r.value /= n;
  return r;
}

}  // namespace lienc::nn
