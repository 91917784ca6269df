#include "lienc/nn/sequential.hpp"

#include "lienc/error.hpp"

namespace lienc::nn {

Sequential::Sequential(const Sequential& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential copy(other);
    *this = std::move(copy);
  }
  return *this;
}

Sequential Sequential::from_specs(const std::vector<LayerSpec>& specs, Init init, KeyStream& rng) {
  Sequential net;
  for (const auto& s : specs) net.add(make_layer(s, init, rng));
  return net;
}

Tensor Sequential::forward(const Tensor& input) {
  activations_.clear();
  activations_.reserve(layers_.size());
  Tensor x = input;
  for (const auto& l : layers_) {
    Tensor y = l->forward(x);
    activations_.push_back(std::move(x));
    x = std::move(y);
  }
  return x;
}

Tensor Sequential::backward(const Tensor& upstream) {
  if (activations_.size() != layers_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "backward() called without a matching forward()");
  }
  Tensor g = upstream;
  for (std::size_t i = layers_.size(); i-- > 0;) g = layers_[i]->backward(activations_[i], g);
  return g;
}

Tensor Sequential::infer(const Tensor& input) const {
  Tensor x = input;
  for (const auto& l : layers_) x = l->forward(x);
  return x;
}

std::vector<Parameter*> Sequential::parameters() {
  std::vector<Parameter*> out;
  for (const auto& l : layers_) {
    for (auto* p : l->parameters()) out.push_back(p);
  }
  return out;
}

void Sequential::zero_grad() {
  for (const auto& l : layers_) l->zero_grad();
}

std::vector<LayerSpec> Sequential::specs() const {
  std::vector<LayerSpec> out;
  for (const auto& l : layers_) out.push_back(l->spec());
  return out;
}

}  // namespace lienc::nn
