#include "lienc/nn/optimizer.hpp"

#include <cmath>

#include "lienc/error.hpp"

namespace lienc::nn {

double SgdSpec::lr_at(int epoch) const {
  double rate = lr;
  for (const auto& [at, mult] : schedule) {
    if (epoch >= at) rate *= mult;
  }
  return rate;
}

void validate(const OptimizerSpec& spec) {
  if (const auto* sgd = std::get_if<SgdSpec>(&spec)) {
    if (!(sgd->lr > 0.0)) throw Error(ErrorCode::InvalidParams, "SGD lr must be > 0");
    if (sgd->momentum < 0.0 || sgd->momentum >= 1.0) {
      throw Error(ErrorCode::InvalidParams, "SGD momentum must lie in [0, 1)");
    }
    if (sgd->weight_decay < 0.0) throw Error(ErrorCode::InvalidParams, "weight decay must be >= 0");
  } else {
    const auto& adam = std::get<AdamSpec>(spec);
    if (!(adam.lr > 0.0)) throw Error(ErrorCode::InvalidParams, "Adam lr must be > 0");
    if (adam.beta1 < 0.0 || adam.beta1 >= 1.0) throw Error(ErrorCode::InvalidParams, "beta1 must lie in [0, 1)");
    if (adam.beta2 < 0.0 || adam.beta2 >= 1.0) throw Error(ErrorCode::InvalidParams, "beta2 must lie in [0, 1)");
  }
}

Optimizer::Optimizer(OptimizerSpec spec, std::vector<Parameter*> params)
    : spec_(std::move(spec)), params_(std::move(params)) {
  validate(spec_);
  for (auto* p : params_) {
    m_.emplace_back(p->value.size(), 0.0);
    v_.emplace_back(p->value.size(), 0.0);
  }
}

double Optimizer::current_lr() const {
  if (const auto* sgd = std::get_if<SgdSpec>(&spec_)) return sgd->lr_at(epoch_);
  return std::get<AdamSpec>(spec_).lr;
}

void Optimizer::step() {
  ++t_;
  if (const auto* sgd = std::get_if<SgdSpec>(&spec_)) {
    const double lr = sgd->lr_at(epoch_);
    for (std::size_t k = 0; k < params_.size(); ++k) {
      auto w = params_[k]->value.data();
      const auto g = params_[k]->grad.data();
      auto& vel = m_[k];
      for (std::size_t i = 0; i < w.size(); ++i) {
        vel[i] = sgd->momentum * vel[i] + g[i] + sgd->weight_decay * w[i];
        w[i] -= lr * vel[i];
      }
    }
    return;
  }
  const auto& adam = std::get<AdamSpec>(spec_);
  const double c1 = 1.0 - std::pow(adam.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(adam.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params_.size(); ++k) {
    auto w = params_[k]->value.data();
    const auto g = params_[k]->grad.data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = adam.beta1 * m[i] + (1.0 - adam.beta1) * g[i];
      v[i] = adam.beta2 * v[i] + (1.0 - adam.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      w[i] -= adam.lr * m_hat / (std::sqrt(v_hat) + adam.eps);
    }
  }
}

}  // namespace lienc::nn
