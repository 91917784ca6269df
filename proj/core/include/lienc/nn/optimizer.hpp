#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "lienc/nn/layers.hpp"

namespace lienc::nn {

/// SGD with momentum and L2 weight decay:
///   v <- momentum * v + g + weight_decay * w;  w <- w - lr * v
/// `schedule` lists (epoch, multiplier) pairs; from that epoch on the rate is
/// additionally scaled by the multiplier.
struct SgdSpec {
  double lr = 0.1;
  double momentum = 0.0;
  double weight_decay = 0.0;
  std::vector<std::pair<int, double>> schedule;

  double lr_at(int epoch) const;
};

struct AdamSpec {
  double lr = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
};

using OptimizerSpec = std::variant<SgdSpec, AdamSpec>;

void validate(const OptimizerSpec& spec);

/// Holds per-parameter state (velocity or Adam moments) for a fixed
/// parameter list.
class Optimizer {
 public:
  Optimizer(OptimizerSpec spec, std::vector<Parameter*> params);

  /// Applies one update using each parameter's accumulated grad.
  void step();
  /// Selects the scheduled SGD rate for `epoch`; no-op for Adam.
  void set_epoch(int epoch) noexcept { epoch_ = epoch; }
  double current_lr() const;
  long steps_taken() const noexcept { return t_; }

 private:
  OptimizerSpec spec_;
  std::vector<Parameter*> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  long t_ = 0;
  int epoch_ = 0;
};

}  // namespace lienc::nn
