#pragma once

#include <span>
#include <vector>

#include "lienc/image.hpp"
#include "lienc/nn/tensor.hpp"

namespace lienc {

/// Affine map between 8-bit components and network values: v = p * scale + offset.
struct PixelScaling {
  double scale = 1.0;
  double offset = 0.0;

  static constexpr PixelScaling symmetric() { return {1.0 / 127.5, -1.0}; }  // [-1, 1]
  static constexpr PixelScaling unit() { return {1.0 / 255.0, 0.0}; }        // [0, 1]
  static constexpr PixelScaling raw() { return {1.0, 0.0}; }

  double to_value(double p) const noexcept { return p * scale + offset; }
  double to_pixel(double v) const noexcept { return (v - offset) / scale; }
};

/// Stacks same-sized images into an [N, 3, H, W] tensor.
nn::Tensor images_to_tensor(std::span<const Image> images, PixelScaling scaling);
nn::Tensor images_to_tensor(std::span<const Image* const> images, PixelScaling scaling);

/// Inverse of images_to_tensor; values are rounded to nearest and clamped to [0, 255].
std::vector<Image> tensor_to_images(const nn::Tensor& t, PixelScaling scaling);

std::uint8_t round_clamp_u8(double v) noexcept;

}  // namespace lienc
