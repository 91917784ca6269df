#pragma once

#include <memory>
#include <vector>

#include "lienc/nn/layers.hpp"

namespace lienc::nn {

/// Ordered layer stack. forward() records activations for the next
/// backward(); infer() does not touch that cache.
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  /// Builds layers from specs, drawing any random init from `rng`.
  static Sequential from_specs(const std::vector<LayerSpec>& specs, Init init, KeyStream& rng);

  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }

  Tensor forward(const Tensor& input);
  Tensor backward(const Tensor& upstream);
  Tensor infer(const Tensor& input) const;

  std::vector<Parameter*> parameters();
  void zero_grad();

  std::size_t size() const noexcept { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_.at(i); }
  const Layer& layer(std::size_t i) const { return *layers_.at(i); }
  std::vector<LayerSpec> specs() const;

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<Tensor> activations_;  // inputs of each layer from the last forward()
};

}  // namespace lienc::nn
