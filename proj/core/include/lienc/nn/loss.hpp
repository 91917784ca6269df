#pragma once

#include "lienc/nn/tensor.hpp"

namespace lienc::nn {

struct LossResult {
  double value = 0.0;
  Tensor grad;  // d value / d prediction
};

/// Mean over all elements of (pred - target)^2.
LossResult loss_mse(const Tensor& pred, const Tensor& target);

inline constexpr double kBceClamp = 1e-12;

struct ScalarLoss {
  double value = 0.0;
  double grad = 0.0;
};

/// -[y ln p + (1 - y) ln(1 - p)] with p clamped to [1e-12, 1 - 1e-12].
ScalarLoss loss_bce(double pred, int label);

/// Mean BCE over every element of `pred` against a single label.
LossResult loss_bce(const Tensor& pred, int label);

}  // namespace lienc::nn
