#include "lienc/image_tensor.hpp"

#include <algorithm>
#include <cmath>

#include "lienc/error.hpp"

namespace lienc {

std::uint8_t round_clamp_u8(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

nn::Tensor images_to_tensor(std::span<const Image* const> images, PixelScaling scaling) {
  if (images.empty()) throw Error(ErrorCode::EmptyDataset, "no images to stack");
  const auto w = static_cast<std::size_t>(images.front()->width());
  const auto h = static_cast<std::size_t>(images.front()->height());
  nn::Tensor t({images.size(), 3, h, w});
  for (std::size_t n = 0; n < images.size(); ++n) {
    const Image& img = *images[n];
    if (!img.same_shape(*images.front())) throw Error(ErrorCode::DimensionMismatch, "images differ in size");
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          t.at(n, c, y, x) = scaling.to_value(img.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(c)));
        }
      }
    }
  }
  return t;
}

nn::Tensor images_to_tensor(std::span<const Image> images, PixelScaling scaling) {
  std::vector<const Image*> ptrs;
  ptrs.reserve(images.size());
  for (const auto& img : images) ptrs.push_back(&img);
  return images_to_tensor(std::span<const Image* const>(ptrs), scaling);
}

std::vector<Image> tensor_to_images(const nn::Tensor& t, PixelScaling scaling) {
  if (t.rank() != 4 || t.dim(1) != 3) {
    throw Error(ErrorCode::ShapeMismatch, "expected [N,3,H,W], got " + nn::shape_string(t.shape()));
  }
  std::vector<Image> out;
  out.reserve(t.dim(0));
  for (std::size_t n = 0; n < t.dim(0); ++n) {
    Image img(static_cast<int>(t.dim(3)), static_cast<int>(t.dim(2)));
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < t.dim(2); ++y) {
        for (std::size_t x = 0; x < t.dim(3); ++x) {
          img.at(static_cast<int>(x), static_cast<int>(y), static_cast<int>(c)) =
              round_clamp_u8(scaling.to_pixel(t.at(n, c, y, x)));
        }
      }
    }
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace lienc
