#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lienc/image.hpp"
#include "lienc/nn/checkpoint.hpp"
#include "lienc/nn/optimizer.hpp"
#include "lienc/nn/sequential.hpp"

namespace lienc {

/// Exact (ciphertext, plaintext) correspondences of one image size.
class PairedSet {
 public:
  void add(Image cipher, Image plain);

  std::size_t size() const noexcept { return cipher_.size(); }
  bool empty() const noexcept { return cipher_.empty(); }
  const std::vector<Image>& ciphers() const noexcept { return cipher_; }
  const std::vector<Image>& plains() const noexcept { return plain_; }
  int width() const;
  int height() const;

 private:
  std::vector<Image> cipher_;
  std::vector<Image> plain_;
};

/// One 3x3 matrix and offset per pixel, in 8-bit units:
/// plain(p) ~= A_p * cipher(p) + b_p.
struct PixelAffineModel {
  int width = 0;
  int height = 0;
  /// Per pixel row-major: A (9 values) followed by b (3 values).
  std::vector<std::array<double, 12>> maps;
  /// Pixels whose system was singular and fell back to the identity map.
  std::vector<std::size_t> singular_pixels;

  static PixelAffineModel identity(int width, int height);
};

/// 96x96 map on nibble vectors of 4x4 blocks, shared by every block:
/// plain_nibbles ~= A * cipher_nibbles + t.
struct BlockAffineModel {
  static constexpr int kDim = 96;
  std::vector<double> a;  // row-major kDim x kDim
  std::vector<double> t;  // kDim

  static BlockAffineModel identity();
};

inline constexpr double kDefaultRidge = 1e-6;

/// Per-pixel ridge least squares (bias unpenalized). Needs >= 4 pairs.
PixelAffineModel fit_itn_pixelwise_closed(const PairedSet& pairs, double ridge = kDefaultRidge);

struct ItnSgdOptions {
  int epochs = 70;
  std::size_t batch_size = 128;
  std::uint64_t seed = 0;  // batch order
  int layers = 3;
  int hidden_channels = 3;
};

/// Reference training schedule: lr 0.1, momentum 0.9, weight decay 5e-4, rate
/// divided by 10 at epochs 40 and 60.
nn::SgdSpec itn_default_schedule();

struct ItnSgdResult {
  nn::Sequential net;          // stack of identity-initialized LocallyConnected1x1 layers
  PixelAffineModel model;      // the stack collapsed to its per-pixel affine map
  std::vector<double> epoch_loss;
};

/// Trains the locally-connected stack on [-1, 1]-scaled pairs with MSE
/// loss. Throws NumericalDivergence on a non-finite loss or gradient.
ItnSgdResult fit_itn_pixelwise_sgd(const PairedSet& pairs, const nn::OptimizerSpec& spec,
                                   const ItnSgdOptions& options = {});

/// Composes a stack of LocallyConnected1x1 layers acting on [-1, 1]-scaled
/// values into the equivalent per-pixel map in 8-bit units.
PixelAffineModel collapse_locally_connected(const nn::Sequential& net);

/// Ridge least squares pooled over every 4x4 block of every pair. Needs at
/// least 97 blocks in total.
BlockAffineModel fit_itn_blockwise_nibble(const PairedSet& pairs, double ridge = kDefaultRidge);

/// Applies the model; results are rounded and clamped (nibbles to [0, 15]).
std::vector<Image> apply_itn(const PixelAffineModel& model, std::span<const Image> images);
std::vector<Image> apply_itn(const BlockAffineModel& model, std::span<const Image> images);
Image apply_itn(const PixelAffineModel& model, const Image& image);
Image apply_itn(const BlockAffineModel& model, const Image& image);

/// Checkpoint forms: a single LocallyConnected1x1 layer on raw 8-bit values,
/// and a Dense 96->96 layer tagged with the nibble-block codec.
nn::Sequential to_network(const PixelAffineModel& model);
nn::Sequential to_network(const BlockAffineModel& model);
PixelAffineModel pixel_model_from_network(const nn::Sequential& net);
BlockAffineModel block_model_from_network(const nn::Sequential& net);

}  // namespace lienc
