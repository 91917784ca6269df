#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lienc/keystream.hpp"
#include "lienc/nn/tensor.hpp"

namespace lienc::nn {

enum class LayerKind : std::uint32_t {
  LocallyConnected1x1 = 1,
  Conv2D = 2,
  Dense = 3,
  LeakyReLU = 4,
  Tanh = 5,
  Sigmoid = 6,
};

std::string to_string(LayerKind kind);

/// Declarative description of a layer; unused fields stay zero.
struct LayerSpec {
  LayerKind kind = LayerKind::Tanh;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int height = 0;  // LocallyConnected1x1 only
  int width = 0;   // LocallyConnected1x1 only
  double slope = 0.2;

  static LayerSpec locally_connected(int in, int out, int height, int width);
  static LayerSpec conv2d(int in, int out, int kernel, int stride, int padding);
  static LayerSpec dense(int in, int out);
  static LayerSpec leaky_relu(double slope);
  static LayerSpec tanh();
  static LayerSpec sigmoid();

  void validate() const;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Parameter {
  Tensor value;
  Tensor grad;

  explicit Parameter(Shape shape) : value(shape), grad(std::move(shape)) {}
};

enum class Init {
  Normal,    // N(0, 0.02) weights, zero bias
  Identity,  // identity channel map, zero bias (LocallyConnected1x1, Conv2D 1x1, Dense)
};

/// A differentiable layer with a stateless forward pass. backward() receives
/// the same input that was given to forward(), accumulates parameter
/// gradients into Parameter::grad and returns the gradient with respect to
/// the input.
class Layer {
 public:
  virtual ~Layer() = default;

  virtual Tensor forward(const Tensor& input) const = 0;
  virtual Tensor backward(const Tensor& input, const Tensor& upstream) = 0;
  virtual std::vector<Parameter*> parameters() { return {}; }
  virtual std::unique_ptr<Layer> clone() const = 0;

  const LayerSpec& spec() const noexcept { return spec_; }
  LayerKind kind() const noexcept { return spec_.kind; }
  void zero_grad();

 protected:
  explicit Layer(LayerSpec spec) : spec_(spec) {}

 private:
  LayerSpec spec_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Init init, KeyStream& rng);

/// Per-pixel 1x1 map with unshared weights: out[:, y, x] = W[y, x] in[:, y, x] + b[y, x].
/// Weight shape [H, W, out, in], bias shape [H, W, out].
class LocallyConnected1x1 final : public Layer {
 public:
  explicit LocallyConnected1x1(const LayerSpec& spec);
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<LocallyConnected1x1>(*this); }

  Parameter& weight() noexcept { return weight_; }
  Parameter& bias() noexcept { return bias_; }
  const Parameter& weight() const noexcept { return weight_; }
  const Parameter& bias() const noexcept { return bias_; }

 private:
  void check_input(const Tensor& input) const;
  Parameter weight_;
  Parameter bias_;
};

/// Cross-correlation with zero padding. Weight [out, in, k, k], bias [out].
class Conv2D final : public Layer {
 public:
  explicit Conv2D(const LayerSpec& spec);
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv2D>(*this); }

  Parameter& weight() noexcept { return weight_; }
  Parameter& bias() noexcept { return bias_; }
  std::size_t output_extent(std::size_t extent) const;

 private:
  void check_input(const Tensor& input) const;
  Parameter weight_;
  Parameter bias_;
};

/// Affine map on the flattened non-batch dimensions. Weight [out, in], bias [out].
class Dense final : public Layer {
 public:
  explicit Dense(const LayerSpec& spec);
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::vector<Parameter*> parameters() override { return {&weight_, &bias_}; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  Parameter& weight() noexcept { return weight_; }
  Parameter& bias() noexcept { return bias_; }

 private:
  void check_input(const Tensor& input) const;
  Parameter weight_;
  Parameter bias_;
};

class LeakyReLU final : public Layer {
 public:
  explicit LeakyReLU(const LayerSpec& spec) : Layer(spec) { spec.validate(); }
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<LeakyReLU>(*this); }
};

class Tanh final : public Layer {
 public:
  Tanh() : Layer(LayerSpec::tanh()) {}
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Tanh>(*this); }
};

class Sigmoid final : public Layer {
 public:
  Sigmoid() : Layer(LayerSpec::sigmoid()) {}
  Tensor forward(const Tensor& input) const override;
  Tensor backward(const Tensor& input, const Tensor& upstream) override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Sigmoid>(*this); }
};

}  // namespace lienc::nn
